#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "kgl/configuration.hpp"

namespace kgl {

/// One configuration in a record file, stamped with a sample index or a time.
struct Record {
  double stamp = 0.0;
  PointSet points;
};

struct RecordHeader {
  std::string model_hash;
  std::uint64_t seed = 0;
  TorusDomain domain;
};

/// Text format:
///   # kgl-samples v1
///   # model_hash=<hex> seed=<n> dim=<d> L=<side>
///   <stamp> <n> x1 [y1 [z1]] x2 ...
/// Coordinates carry 9 significant digits.
void write_records(std::ostream &os, const RecordHeader &h, const std::vector<Record> &recs);

struct RecordFile {
  RecordHeader header;
  std::vector<Record> records;
};

/// Throws std::runtime_error on malformed input.
RecordFile read_records(std::istream &is);

void write_records_file(const std::string &path, const RecordHeader &h,
                        const std::vector<Record> &recs);
RecordFile read_records_file(const std::string &path);

} // namespace kgl
