#include "msnet/window.hpp"

#include <stdexcept>

namespace msnet {

void RealizedWindow::clear(long first) {
  first_ = first;
  shift_ = 0.0;
  epochs_.clear();
  offsets_.assign(1, 0);
  visits_.clear();
}

void RealizedWindow::reserve(std::size_t customers, std::size_t visits) {
  epochs_.reserve(customers);
  offsets_.reserve(customers + 1);
  visits_.reserve(visits);
}

void RealizedWindow::push_back(double epoch, std::span<const Visit> visits) {
  epochs_.push_back(epoch);
  visits_.insert(visits_.end(), visits.begin(), visits.end());
  offsets_.push_back(visits_.size());
}

double RealizedWindow::station_work(std::size_t i, int station) const {
  double sum = 0.0;
  for (const auto& v : visits(i)) {
    if (v.station == station) sum += v.work;
  }
  return sum;
}

RealizedWindow RealizedWindow::shifted(double c) const {
  RealizedWindow w = *this;
  w.shift_ = shift_ + c;
  return w;
}

RealizedWindow RealizedWindow::subwindow(std::size_t lo, std::size_t hi) const {
  if (lo > hi || hi >= size()) throw std::out_of_range("subwindow: bad range");
  RealizedWindow w(first_ + static_cast<long>(lo));
  w.shift_ = shift_;
  w.reserve(hi - lo + 1, offsets_[hi + 1] - offsets_[lo]);
  for (std::size_t i = lo; i <= hi; ++i) w.push_back(epochs_[i], visits(i));
  return w;
}

RealizedWindow RealizedWindow::saturated() const {
  RealizedWindow w = *this;
  w.shift_ = 0.0;
  for (auto& t : w.epochs_) t = 0.0;
  return w;
}

void RealizedWindow::validate() const {
  if (epochs_.empty()) throw std::invalid_argument("window: empty");
  for (std::size_t i = 1; i < epochs_.size(); ++i) {
    if (!(epochs_[i] >= epochs_[i - 1])) throw std::invalid_argument("window: epochs must be nondecreasing");
  }
  for (std::size_t i = 0; i < epochs_.size(); ++i) {
    if (offsets_[i + 1] == offsets_[i]) throw std::invalid_argument("window: customer without driving variables");
  }
}

}  // namespace msnet
