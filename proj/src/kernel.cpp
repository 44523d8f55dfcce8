#include "msnet/kernel.hpp"

#include <stdexcept>

namespace msnet {

void NetworkKernel::check_window(const RealizedWindow& w) const {
  w.validate();
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!visits_fit(w.visits(i))) {
      throw std::invalid_argument(name() + ": driving variables of customer " + std::to_string(w.first() + long(i)) +
                                  " do not match the model");
    }
  }
}

double NetworkKernel::last_activity(const RealizedWindow& w) const {
  check_window(w);
  return w.shift() + evaluate(w);
}

double NetworkKernel::maximal_dater(const RealizedWindow& w) const {
  check_window(w);
  return evaluate(w) - w.epochs().back();
}

}  // namespace msnet
