#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "ssmri/tensor.hpp"

namespace ssmri {

// RTEN tensor file: magic "RTEN1", u8 dtype (0 = f32, 1 = f64),
// u32 ndim, u32 dims[ndim], then raw little-endian row-major data.
enum class RtenDtype : std::uint8_t { kF32 = 0, kF64 = 1 };

void write_rten(std::ostream& os, const Tensor& t, RtenDtype dtype = RtenDtype::kF64);
Tensor read_rten(std::istream& is, RtenDtype* dtype_out = nullptr);

void write_rten(const std::string& path, const Tensor& t, RtenDtype dtype = RtenDtype::kF64);
Tensor read_rten(const std::string& path, RtenDtype* dtype_out = nullptr);

}  // namespace ssmri
