#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ssmri/tensor.hpp"

namespace ssmri {

// Binary k-space sampling pattern. The acs_lines central rows are fully
// sampled; the rest is scattered 2D point sampling.
struct Mask {
  int height = 0;
  int width = 0;
  int acs_lines = 0;
  int accel = 1;  // nominal acceleration rate
  std::uint64_t seed = 0;
  std::vector<std::uint8_t> pattern;  // H·W row-major, values 0/1

  bool on(int y, int x) const {
    return pattern[static_cast<std::size_t>(y) * width + x] != 0;
  }
  int count_nonzero() const;
  Tensor to_tensor() const;  // H×W of 0.0/1.0
};

// Supports of the two k-space subsets fed to the parallel branches.
struct SubsetPair {
  Mask sub1, sub2;
  Mask parent;
};

// First row of the centered ACS block.
int acs_row_start(int height, int acs_lines);

// Central acs_lines rows fully sampled; outside them, exactly enough
// uniformly chosen points to hit a total of H·W/accel samples.
Mask make_undersampling_mask(int h, int w, int accel, int acs_lines, std::uint64_t seed);

// Draws two distinct selection masks (sel_acs ACS lines, point density
// chosen so each intersection keeps about half of the parent's samples)
// and intersects them with the parent. Retries until both subsets land
// in [0.4, 0.6]·|parent| and differ; throws after 100 attempts.
SubsetPair make_selection_subsets(const Mask& parent, int sel_acs, std::uint64_t seed);

// path_prefix.rten (f32 H×W) + path_prefix.json sidecar
void save_mask(const Mask& m, const std::string& path_prefix);
Mask load_mask(const std::string& path_prefix);

}  // namespace ssmri
