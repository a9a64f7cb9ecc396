#include "kgl/records.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace kgl {

void write_records(std::ostream &os, const RecordHeader &h, const std::vector<Record> &recs) {
  const int d = h.domain.dim();
  os << "# kgl-samples v1\n";
  os << "# model_hash=" << h.model_hash << " seed=" << h.seed << " dim=" << d
     << " L=" << std::setprecision(17) << h.domain.side() << "\n";
  os << std::setprecision(9);
  for (const auto &r : recs) {
    os << r.stamp << ' ' << r.points.size();
    for (const auto &p : r.points)
      for (int k = 0; k < d; ++k)
        os << ' ' << p[k];
    os << '\n';
  }
}

RecordFile read_records(std::istream &is) {
  RecordFile out;
  std::string line;
  if (!std::getline(is, line) || line != "# kgl-samples v1")
    throw std::runtime_error("record file: missing format line");
  if (!std::getline(is, line) || line.rfind("# ", 0) != 0)
    throw std::runtime_error("record file: missing header line");
  int dim = 0;
  double side = 0.0;
  {
    std::istringstream hs(line.substr(2));
    std::string tok;
    while (hs >> tok) {
      auto eq = tok.find('=');
      if (eq == std::string::npos) throw std::runtime_error("record file: bad header token " + tok);
      std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
      if (key == "model_hash") out.header.model_hash = val;
      else if (key == "seed") out.header.seed = std::stoull(val);
      else if (key == "dim") dim = std::stoi(val);
      else if (key == "L") side = std::stod(val);
    }
  }
  out.header.domain = TorusDomain(dim, side);
  std::size_t lineno = 2;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    Record r;
    std::size_t n = 0;
    if (!(ls >> r.stamp >> n)) throw std::runtime_error("record file: bad line " + std::to_string(lineno));
    r.points.resize(n, Point{0.0, 0.0, 0.0});
    for (auto &p : r.points)
      for (int k = 0; k < dim; ++k)
        if (!(ls >> p[k]))
          throw std::runtime_error("record file: short line " + std::to_string(lineno));
    std::string extra;
    if (ls >> extra) throw std::runtime_error("record file: trailing data on line " + std::to_string(lineno));
    out.records.push_back(std::move(r));
  }
  return out;
}

void write_records_file(const std::string &path, const RecordHeader &h,
                        const std::vector<Record> &recs) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path);
  write_records(os, h, recs);
}

RecordFile read_records_file(const std::string &path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  return read_records(is);
}

} // namespace kgl
