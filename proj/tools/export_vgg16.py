#!/usr/bin/env python3
"""Export torchvision VGG-16 (ImageNet) conv1_1..conv4_3 into a tpsr tensor archive.

    python3 tools/export_vgg16.py vgg16_prefix.tpsr     # needs torchvision
    python3 tools/export_vgg16.py --manifest-only       # rewrite tools/vgg16_manifest.json
"""
import argparse
import json
import struct
import zlib
from pathlib import Path

# (name, in, out, max-pool before the conv, index in torchvision's vgg16.features)
LAYERS = [
    ("conv1_1", 3, 64, False, 0),
    ("conv1_2", 64, 64, False, 2),
    ("conv2_1", 64, 128, True, 5),
    ("conv2_2", 128, 128, False, 7),
    ("conv3_1", 128, 256, True, 10),
    ("conv3_2", 256, 256, False, 12),
    ("conv3_3", 256, 256, False, 14),
    ("conv4_1", 256, 512, True, 17),
    ("conv4_2", 512, 512, False, 19),
    ("conv4_3", 512, 512, False, 21),
]
TAPS = {"relu1_2": 1, "relu2_2": 3, "relu4_1": 7, "relu4_3": 9}


def manifest():
    tensors = []
    for name, cin, cout, _, _ in LAYERS:
        tensors.append({"name": name + ".weight", "shape": [cout, cin, 3, 3]})
        tensors.append({"name": name + ".bias", "shape": [cout]})
    taps = {}
    for tap, last in TAPS.items():
        field, jump = 1, 1
        for _, _, _, pool, _ in LAYERS[: last + 1]:
            if pool:
                field += jump
                jump *= 2
            field += 2 * jump
        taps[tap] = {"channels": LAYERS[last][2], "downsampling": jump, "receptive_field": field}
    return {
        "architecture": "vgg16-prefix-to-relu4_3",
        "input": "RGB in [0,1], normalized internally with ImageNet mean/std",
        "tensors": tensors,
        "taps": taps,
    }


def write_archive(path, named):
    entries, payload, offset = [], bytearray(), 0
    for name, array in named:
        raw = array.astype("<f4").tobytes()
        entries.append({"name": name, "dtype": "float32", "shape": list(array.shape),
                        "offset": offset, "nbytes": len(raw)})
        payload += raw
        offset += len(raw)
    head = json.dumps({"kind": "vgg16-prefix", "meta": {"source": "torchvision IMAGENET1K_V1"},
                       "tensors": entries}, separators=(",", ":")).encode()
    out = bytearray(b"TPSRARCH") + struct.pack("<IQ", 1, len(head)) + head
    out += struct.pack("<Q", len(payload)) + payload
    out += struct.pack("<I", zlib.crc32(bytes(out)) & 0xFFFFFFFF)
    Path(path).write_bytes(bytes(out))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("out", nargs="?")
    ap.add_argument("--manifest-only", action="store_true")
    args = ap.parse_args()
    if args.manifest_only:
        target = Path(__file__).with_name("vgg16_manifest.json")
        target.write_text(json.dumps(manifest(), indent=2) + "\n")
        return
    if not args.out:
        ap.error("output path required")
    import torchvision

    features = torchvision.models.vgg16(weights="IMAGENET1K_V1").features
    named = []
    for name, _, _, _, idx in LAYERS:
        conv = features[idx]
        named.append((name + ".weight", conv.weight.detach().numpy()))
        named.append((name + ".bias", conv.bias.detach().numpy()))
    write_archive(args.out, named)


if __name__ == "__main__":
    main()
