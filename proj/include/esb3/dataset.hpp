#pragma once

#include <span>
#include <string>
#include <vector>

namespace esb3 {

/// One-dimensional sample with provenance. Values are validated (nonempty,
/// finite) on construction and a sorted copy is kept for ECDF work.
class Dataset {
public:
    Dataset(std::vector<double> values, std::string label, std::string source);

    std::span<const double> values() const { return values_; }
    std::span<const double> sorted() const { return sorted_; }
    std::size_t size() const { return values_.size(); }
    const std::string& label() const { return label_; }
    const std::string& source() const { return source_; }

private:
    std::vector<double> values_;
    std::vector<double> sorted_;
    std::string label_;
    std::string source_;
};

} // namespace esb3
