#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace tchedge {

// Row-major (cell, mark) table.
template <class T>
class CellTable {
 public:
  CellTable() = default;
  CellTable(std::size_t cells, std::size_t marks, T value = T{})
      : cells_(cells), marks_(marks), data_(cells * marks, value) {}

  std::size_t cells() const { return cells_; }
  std::size_t marks() const { return marks_; }

  T& operator()(std::size_t cell, std::size_t mark) { return data_[cell * marks_ + mark]; }
  const T& operator()(std::size_t cell, std::size_t mark) const {
    return data_[cell * marks_ + mark];
  }

  T& at(std::size_t cell, std::size_t mark) {
    check(cell, mark);
    return (*this)(cell, mark);
  }
  const T& at(std::size_t cell, std::size_t mark) const {
    check(cell, mark);
    return (*this)(cell, mark);
  }

  const std::vector<T>& data() const { return data_; }
  bool operator==(const CellTable& other) const = default;

 private:
  void check(std::size_t cell, std::size_t mark) const {
    if (cell >= cells_ || mark >= marks_) throw std::out_of_range("CellTable index");
  }

  std::size_t cells_ = 0;
  std::size_t marks_ = 0;
  std::vector<T> data_;
};

}  // namespace tchedge
