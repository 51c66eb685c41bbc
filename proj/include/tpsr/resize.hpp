#pragma once

#include <vector>

#include "tpsr/image.hpp"

namespace tpsr {

// Resampling request. Output sides are ceil(scale * input side), the
// convention of MATLAB's imresize.
struct ResizeSpec {
  double scale = 1.0;
  bool antialias = true;
};

// Keys cubic kernel with a = -0.5.
double cubic_kernel(double x);

// Sparse 1-D resampling weights for one axis: output i reads
// input[indices[i][k]] * weights[i][k]. Weights of each row sum to 1.
struct AxisWeights {
  int in_size = 0;
  int out_size = 0;
  std::vector<std::vector<int>> indices;
  std::vector<std::vector<double>> weights;
};

int resized_extent(int in_size, double scale);

// MATLAB-style contributions: kernel widened by 1/scale when downscaling with
// antialias, symmetric boundary extension and per-output weight
// normalization.
AxisWeights axis_weights(int in_size, int out_size, double scale, bool antialias);

// Separable bicubic resampling; output clamped to [0,1].
ImageTensor resize_bicubic(const ImageTensor& img, const ResizeSpec& spec);

// The ×s bicubic degradation protocol: downscale with antialias, store on
// the 8-bit grid, upscale back, store on the 8-bit grid. Used for the
// bicubic baseline of benchmark tables.
ImageTensor bicubic_degrade(const ImageTensor& hr, int factor);
ImageTensor bicubic_round_trip(const ImageTensor& hr, int factor);

}  // namespace tpsr
