#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>

#include "cbtest/samples.hpp"

namespace cbtest {

struct csv_error : std::runtime_error {
    explicit csv_error(const std::string& what) : std::runtime_error(what) {}
};

// Two numeric columns per row, comma separated; an optional header row is
// auto-detected. Each row is one unordered measurement pair. Bad rows raise
// csv_error naming the line number.
LabeledSample read_pairs_csv(std::istream& in, const std::string& source_name);
LabeledSample read_pairs_csv_file(const std::string& path);

// shortest round-trip decimal form; machine outputs use this everywhere
std::string format_double(double v);

}  // namespace cbtest
