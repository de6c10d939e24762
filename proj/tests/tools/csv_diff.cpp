// csv_diff expected.csv actual.csv [rel_tol]
// Cells must match exactly unless both parse as numbers, in which case they
// may differ by rel_tol * max(1, |expected|).

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

bool as_number(const std::string& s, double& v) {
  if (s.empty()) return false;
  char* end = nullptr;
  v = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size();
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    std::fprintf(stderr, "usage: csv_diff expected.csv actual.csv [rel_tol]\n");
    return 2;
  }
  const double tol = argc > 3 ? std::atof(argv[3]) : 1e-9;
  std::ifstream a(argv[1]), b(argv[2]);
  if (!a || !b) {
    std::fprintf(stderr, "csv_diff: cannot open input\n");
    return 2;
  }
  std::string la, lb;
  int line = 0, bad = 0;
  while (true) {
    const bool ga = static_cast<bool>(std::getline(a, la)), gb = static_cast<bool>(std::getline(b, lb));
    ++line;
    if (!ga && !gb) break;
    if (ga != gb) {
      std::fprintf(stderr, "line %d: row count differs\n", line);
      return 1;
    }
    const auto ca = split(la), cb = split(lb);
    if (ca.size() != cb.size()) {
      std::fprintf(stderr, "line %d: %zu vs %zu cells\n", line, ca.size(), cb.size());
      ++bad;
      continue;
    }
    for (std::size_t i = 0; i < ca.size(); ++i) {
      double x, y;
      const bool ok = ca[i] == cb[i] || (as_number(ca[i], x) && as_number(cb[i], y) &&
                                         std::abs(x - y) <= tol * std::max(1.0, std::abs(x)));
      if (!ok) {
        std::fprintf(stderr, "line %d col %zu: expected '%s' got '%s'\n", line, i + 1, ca[i].c_str(), cb[i].c_str());
        ++bad;
      }
    }
  }
  return bad ? 1 : 0;
}
