#include "ssmri/rten.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace ssmri {

namespace {

constexpr char kMagic[5] = {'R', 'T', 'E', 'N', '1'};

void put_u32(std::ostream& os, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
  os.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::istream& is) {
  unsigned char b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  if (!is) throw std::runtime_error("rten: truncated header");
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

}  // namespace

void write_rten(std::ostream& os, const Tensor& t, RtenDtype dtype) {
  os.write(kMagic, 5);
  const auto tag = static_cast<unsigned char>(dtype);
  os.write(reinterpret_cast<const char*>(&tag), 1);
  put_u32(os, static_cast<std::uint32_t>(t.ndim()));
  for (int i = 0; i < t.ndim(); ++i) put_u32(os, static_cast<std::uint32_t>(t.dim(i)));
  if (dtype == RtenDtype::kF64) {
    // assumes little-endian host, as everything here does
    os.write(reinterpret_cast<const char*>(t.data()), static_cast<std::streamsize>(t.size() * 8));
  } else {
    std::vector<float> buf(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) buf[i] = static_cast<float>(t[i]);
    os.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size() * 4));
  }
  if (!os) throw std::runtime_error("rten: write failed");
}

Tensor read_rten(std::istream& is, RtenDtype* dtype_out) {
  char magic[5];
  is.read(magic, 5);
  if (!is || std::memcmp(magic, kMagic, 5) != 0) throw std::runtime_error("rten: bad magic");
  unsigned char tag = 0;
  is.read(reinterpret_cast<char*>(&tag), 1);
  if (!is || tag > 1) throw std::runtime_error("rten: bad dtype tag");
  const auto dtype = static_cast<RtenDtype>(tag);
  if (dtype_out) *dtype_out = dtype;
  const std::uint32_t ndim = get_u32(is);
  if (ndim == 0 || ndim > 8) throw std::runtime_error("rten: unreasonable ndim");
  std::vector<int> shape(ndim);
  for (auto& d : shape) {
    std::uint32_t v = get_u32(is);
    if (v == 0 || v > (1u << 24)) throw std::runtime_error("rten: unreasonable dimension");
    d = static_cast<int>(v);
  }
  Tensor t(shape);
  if (dtype == RtenDtype::kF64) {
    is.read(reinterpret_cast<char*>(t.data()), static_cast<std::streamsize>(t.size() * 8));
  } else {
    std::vector<float> buf(t.size());
    is.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size() * 4));
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = static_cast<double>(buf[i]);
  }
  if (!is) throw std::runtime_error("rten: truncated data");
  return t;
}

void write_rten(const std::string& path, const Tensor& t, RtenDtype dtype) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("rten: cannot open for write: " + path);
  write_rten(f, t, dtype);
}

Tensor read_rten(const std::string& path, RtenDtype* dtype_out) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("rten: cannot open: " + path);
  return read_rten(f, dtype_out);
}

}  // namespace ssmri
