#include "medoidjl/pointset_io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>

namespace medoidjl {

std::string format_double(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r'))
    text.remove_suffix(1);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double v = 0.0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  require(res.ec == std::errc() && res.ptr == text.data() + text.size(), ErrorCode::kParse,
          "not a number: '" + std::string(text) + "'");
  return v;
}

namespace {

std::uint64_t parse_weight(std::string_view text) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\r')) text.remove_suffix(1);
  std::uint64_t w = 0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), w);
  require(res.ec == std::errc() && res.ptr == text.data() + text.size() && w >= 1,
          ErrorCode::kParse, "weight must be a positive integer: '" + std::string(text) + "'");
  return w;
}

}  // namespace

void write_pointset_csv(std::ostream& out, const WeightedPointSet& set) {
  out << "# dim=" << set.dim() << '\n';
  for (std::size_t i = 0; i < set.size(); ++i) {
    out << set.weight(i);
    for (double x : set.point(i)) out << ',' << format_double(x);
    out << '\n';
  }
}

WeightedPointSet read_pointset_csv(std::istream& in) {
  std::string line;
  std::size_t dim = 0;
  bool have_header = false;
  std::vector<double> coords;
  std::vector<std::uint64_t> weights;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!have_header) {
      constexpr std::string_view prefix = "# dim=";
      require(line.rfind(prefix, 0) == 0, ErrorCode::kParse,
              "point-set CSV must start with '# dim=<d>'");
      std::string_view rest(line);
      rest.remove_prefix(prefix.size());
      auto res = std::from_chars(rest.data(), rest.data() + rest.size(), dim);
      require(res.ec == std::errc() && dim >= 1, ErrorCode::kParse, "bad dimension header");
      have_header = true;
      continue;
    }
    if (line.front() == '#') continue;
    std::string_view view(line);
    std::size_t field = 0;
    while (true) {
      auto comma = view.find(',');
      auto tok = view.substr(0, comma);
      if (field == 0) {
        weights.push_back(parse_weight(tok));
      } else {
        coords.push_back(parse_double(tok));
      }
      ++field;
      if (comma == std::string_view::npos) break;
      view.remove_prefix(comma + 1);
    }
    require(field == dim + 1, ErrorCode::kParse,
            "line " + std::to_string(lineno) + ": expected " + std::to_string(dim + 1) +
                " fields, got " + std::to_string(field));
  }
  require(have_header, ErrorCode::kParse, "missing '# dim=<d>' header");
  require(!weights.empty(), ErrorCode::kEmptyInput, "point-set CSV has no rows");
  return WeightedPointSet(dim, std::move(coords), std::move(weights));
}

void save_pointset_csv(const std::string& path, const WeightedPointSet& set) {
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorCode::kIo, "cannot open for writing: " + path);
  write_pointset_csv(out, set);
  require(static_cast<bool>(out), ErrorCode::kIo, "write failed: " + path);
}

WeightedPointSet load_pointset_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorCode::kIo, "cannot open for reading: " + path);
  return read_pointset_csv(in);
}

}  // namespace medoidjl
