#include "ssmri/mask.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "json.hpp"
#include "ssmri/rng.hpp"
#include "ssmri/rten.hpp"

namespace ssmri {

namespace {

// Sets `count` uniformly chosen candidates to 1 via partial Fisher-Yates.
void scatter_points(std::vector<std::uint8_t>& pattern, std::vector<std::uint32_t>& candidates,
                    std::size_t count, Rng& rng) {
  const std::size_t n = candidates.size();
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
    std::swap(candidates[i], candidates[j]);
    pattern[candidates[i]] = 1;
  }
}

std::vector<std::uint32_t> cells_outside_acs(int h, int w, int acs_start, int acs_lines) {
  std::vector<std::uint32_t> cells;
  cells.reserve(static_cast<std::size_t>(h - acs_lines) * w);
  for (int y = 0; y < h; ++y) {
    if (y >= acs_start && y < acs_start + acs_lines) continue;
    for (int x = 0; x < w; ++x) cells.push_back(static_cast<std::uint32_t>(y) * w + x);
  }
  return cells;
}

}  // namespace

int Mask::count_nonzero() const {
  int n = 0;
  for (auto v : pattern) n += v;
  return n;
}

Tensor Mask::to_tensor() const {
  Tensor t({height, width});
  for (std::size_t i = 0; i < pattern.size(); ++i) t[i] = pattern[i] ? 1.0 : 0.0;
  return t;
}

int acs_row_start(int height, int acs_lines) { return (height - acs_lines) / 2; }

Mask make_undersampling_mask(int h, int w, int accel, int acs_lines, std::uint64_t seed) {
  if (h <= 0 || w <= 0) throw std::invalid_argument("make_undersampling_mask: bad size");
  if (accel < 1) throw std::invalid_argument("make_undersampling_mask: accel must be >= 1");
  if (acs_lines < 0 || acs_lines >= h)
    throw std::invalid_argument("make_undersampling_mask: acs_lines must be in [0, h)");

  const long long budget = std::llround(static_cast<double>(h) * w / accel);
  const long long acs_points = static_cast<long long>(acs_lines) * w;
  if (acs_points > budget)
    throw std::invalid_argument("make_undersampling_mask: ACS lines alone exceed the sampling budget");

  Mask m;
  m.height = h;
  m.width = w;
  m.acs_lines = acs_lines;
  m.accel = accel;
  m.seed = seed;
  m.pattern.assign(static_cast<std::size_t>(h) * w, 0);

  const int acs_start = acs_row_start(h, acs_lines);
  for (int y = acs_start; y < acs_start + acs_lines; ++y)
    for (int x = 0; x < w; ++x) m.pattern[static_cast<std::size_t>(y) * w + x] = 1;

  auto cells = cells_outside_acs(h, w, acs_start, acs_lines);
  Rng rng(seed);
  scatter_points(m.pattern, cells, static_cast<std::size_t>(budget - acs_points), rng);
  return m;
}

SubsetPair make_selection_subsets(const Mask& parent, int sel_acs, std::uint64_t seed) {
  if (sel_acs < 0 || sel_acs > parent.acs_lines)
    throw std::invalid_argument("make_selection_subsets: sel_acs must be in [0, parent.acs_lines]");
  const int h = parent.height;
  const int w = parent.width;
  const int parent_count = parent.count_nonzero();
  if (parent_count == 0) throw std::invalid_argument("make_selection_subsets: empty parent mask");

  const int sel_start = acs_row_start(h, sel_acs);
  long long acs_overlap = 0;  // parent points inside the selection ACS rows
  for (int y = sel_start; y < sel_start + sel_acs; ++y)
    for (int x = 0; x < w; ++x) acs_overlap += parent.on(y, x) ? 1 : 0;

  const double target = 0.5 * parent_count;
  const long long outside_parent = parent_count - acs_overlap;
  double density = 0.0;
  if (outside_parent > 0)
    density = std::clamp((target - static_cast<double>(acs_overlap)) / static_cast<double>(outside_parent),
                         0.0, 1.0);
  auto cells = cells_outside_acs(h, w, sel_start, sel_acs);
  const auto scatter_count =
      static_cast<std::size_t>(std::llround(density * static_cast<double>(cells.size())));

  const int lo = static_cast<int>(std::floor(0.4 * parent_count));
  const int hi = static_cast<int>(std::ceil(0.6 * parent_count));

  Rng rng(seed);
  auto draw_subset = [&](const Mask* must_differ_from) {
    for (int attempt = 0; attempt < 100; ++attempt) {
      Mask sel;
      sel.height = h;
      sel.width = w;
      sel.acs_lines = sel_acs;
      sel.seed = seed;
      sel.pattern.assign(static_cast<std::size_t>(h) * w, 0);
      for (int y = sel_start; y < sel_start + sel_acs; ++y)
        for (int x = 0; x < w; ++x) sel.pattern[static_cast<std::size_t>(y) * w + x] = 1;
      scatter_points(sel.pattern, cells, scatter_count, rng);

      for (std::size_t i = 0; i < sel.pattern.size(); ++i)
        sel.pattern[i] = static_cast<std::uint8_t>(sel.pattern[i] & parent.pattern[i]);

      const int n = sel.count_nonzero();
      if (n < lo || n > hi) continue;
      if (must_differ_from && sel.pattern == must_differ_from->pattern) continue;
      sel.accel = static_cast<int>(std::llround(static_cast<double>(h) * w / std::max(1, n)));
      return sel;
    }
    throw std::runtime_error(
        "make_selection_subsets: could not draw a subset in [0.4, 0.6] of the parent after 100 attempts");
  };

  SubsetPair pair;
  pair.parent = parent;
  pair.sub1 = draw_subset(nullptr);
  pair.sub2 = draw_subset(&pair.sub1);
  return pair;
}

void save_mask(const Mask& m, const std::string& path_prefix) {
  write_rten(path_prefix + ".rten", m.to_tensor(), RtenDtype::kF32);
  nlohmann::json j;
  j["height"] = m.height;
  j["width"] = m.width;
  j["accel"] = m.accel;
  j["acs_lines"] = m.acs_lines;
  j["seed"] = m.seed;
  std::ofstream f(path_prefix + ".json");
  if (!f) throw std::runtime_error("save_mask: cannot open " + path_prefix + ".json");
  f << j.dump(2) << "\n";
}

Mask load_mask(const std::string& path_prefix) {
  std::ifstream f(path_prefix + ".json");
  if (!f) throw std::runtime_error("load_mask: cannot open " + path_prefix + ".json");
  nlohmann::json j;
  f >> j;
  Mask m;
  m.height = j.at("height").get<int>();
  m.width = j.at("width").get<int>();
  m.accel = j.at("accel").get<int>();
  m.acs_lines = j.at("acs_lines").get<int>();
  m.seed = j.at("seed").get<std::uint64_t>();

  const Tensor t = read_rten(path_prefix + ".rten");
  if (t.ndim() != 2 || t.dim(0) != m.height || t.dim(1) != m.width)
    throw std::runtime_error("load_mask: pattern shape does not match sidecar for " + path_prefix);
  m.pattern.resize(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] != 0.0 && t[i] != 1.0)
      throw std::runtime_error("load_mask: pattern must be binary in " + path_prefix);
    m.pattern[i] = t[i] != 0.0 ? 1 : 0;
  }
  return m;
}

}  // namespace ssmri
