#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <queue>
#include <stdexcept>

#include "msnet/models.hpp"

namespace msnet {

namespace {

constexpr int kExit = -1;

struct StackEntry {
  double work;
  int next;  // station index or kExit
};

struct PendingEvent {
  double epoch;
  int station;
  long customer;
  bool completion;  // completions before arrivals at equal (epoch, station)

  // Lexicographic (epoch, station, customer); priority_queue is a max-heap.
  bool operator<(const PendingEvent& o) const {
    if (epoch != o.epoch) return epoch > o.epoch;
    if (station != o.station) return station > o.station;
    if (completion != o.completion) return !completion;
    return customer > o.customer;
  }
};

}  // namespace

JacksonModel::JacksonModel(std::vector<HeavyTailDist> services, std::vector<std::vector<double>> routing,
                           std::vector<double> entry, ArrivalSpec arrivals, std::uint64_t event_cap)
    : NetworkKernel(std::move(arrivals)),
      services_(std::move(services)),
      routing_(std::move(routing)),
      entry_(std::move(entry)),
      event_cap_(event_cap) {
  const std::size_t r = services_.size();
  if (r == 0) throw std::invalid_argument("jackson: need at least one station");
  if (routing_.size() != r) throw std::invalid_argument("jackson: one routing row per station required");
  if (entry_.size() != r) throw std::invalid_argument("jackson: entry row must have one entry per station");
  auto check_row = [](const std::vector<double>& row, const char* what) {
    double sum = 0.0;
    for (double p : row) {
      if (!(p >= 0.0)) throw std::invalid_argument(std::string("jackson: negative probability in ") + what);
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument(std::string("jackson: ") + what + " must sum to 1");
  };
  for (const auto& row : routing_) {
    if (row.size() != r + 1) throw std::invalid_argument("jackson: routing rows need r + 1 entries");
    check_row(row, "routing row");
  }
  check_row(entry_, "entry row");

  Eigen::MatrixXd p(r, r);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < r; ++j) p(i, j) = routing_[i][j];
  const double radius = p.eigenvalues().cwiseAbs().maxCoeff();
  if (!(radius < 1.0 - 1e-12)) throw std::invalid_argument("jackson: routing spectral radius must be < 1");
  const Eigen::RowVectorXd e = Eigen::Map<const Eigen::RowVectorXd>(entry_.data(), static_cast<Eigen::Index>(r));
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(r, r);
  // pi (I - P) = e
  const Eigen::RowVectorXd pi = (eye - p).transpose().partialPivLu().solve(e.transpose()).transpose();
  visit_means_.assign(pi.data(), pi.data() + r);
}

double JacksonModel::gamma0_reference() const {
  const auto b = component_means();
  return *std::max_element(b.begin(), b.end());
}

std::vector<double> JacksonModel::component_means() const {
  std::vector<double> b(services_.size());
  for (std::size_t j = 0; j < b.size(); ++j) b[j] = visit_means_[j] * services_[j].mean();
  return b;
}

int JacksonModel::draw_station(std::span<const double> row, RngStream& rng) const {
  // A row with a single outcome consumes no uniform, so a fixed route reads
  // the same service uniforms as the dedicated tandem kernel.
  std::size_t support = 0, only = 0;
  for (std::size_t k = 0; k < row.size(); ++k) {
    if (row[k] > 0.0) {
      ++support;
      only = k;
    }
  }
  if (support == 1) return only < services_.size() ? static_cast<int>(only) : kExit;
  const double u = rng.uniform();
  double acc = 0.0;
  for (std::size_t k = 0; k < row.size(); ++k) {
    acc += row[k];
    if (u < acc) return k < services_.size() ? static_cast<int>(k) : kExit;
  }
  // u beyond the rounded sum: take the last outcome with positive mass.
  for (std::size_t k = row.size(); k-- > 0;) {
    if (row[k] > 0.0) return k < services_.size() ? static_cast<int>(k) : kExit;
  }
  return kExit;
}

void JacksonModel::sample_customer(RngStream& service, std::vector<Visit>& out) const {
  out.clear();
  int station = draw_station(entry_, service);
  while (station != kExit) {
    if (out.size() >= event_cap_) throw EventCapExceeded("jackson: lone route exceeded the event cap");
    out.push_back(Visit{station, services_[static_cast<std::size_t>(station)].sample(service)});
    station = draw_station(routing_[static_cast<std::size_t>(station)], service);
  }
}

LoneCustomer JacksonModel::single_customer(RngStream& rng) const {
  std::vector<Visit> route;
  sample_customer(rng, route);
  LoneCustomer lone{std::vector<int>(services_.size(), 0), std::vector<double>(services_.size(), 0.0)};
  for (const auto& v : route) {
    lone.visits[static_cast<std::size_t>(v.station)] += 1;
    lone.work[static_cast<std::size_t>(v.station)] += v.work;
  }
  return lone;
}

std::unique_ptr<NetworkKernel> JacksonModel::with_arrivals(ArrivalSpec arrivals) const {
  return std::make_unique<JacksonModel>(services_, routing_, entry_, std::move(arrivals), event_cap_);
}

bool JacksonModel::visits_fit(std::span<const Visit> visits) const {
  if (visits.empty()) return false;
  return std::all_of(visits.begin(), visits.end(), [this](const Visit& v) {
    return v.station >= 0 && v.station < stations() && v.work >= 0.0;
  });
}

JacksonRun JacksonModel::simulate(const RealizedWindow& w, bool keep_log) const {
  const std::size_t r = services_.size();
  const auto epochs = w.epochs();

  // Station stacks: customers' lone routes concatenated in customer order.
  std::vector<std::vector<StackEntry>> stacks(r);
  std::vector<int> entry_station(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    const auto route = w.visits(i);
    entry_station[i] = route[0].station;
    for (std::size_t k = 0; k < route.size(); ++k) {
      const int next = k + 1 < route.size() ? route[k + 1].station : kExit;
      stacks[static_cast<std::size_t>(route[k].station)].push_back({route[k].work, next});
    }
  }

  std::vector<std::size_t> served(r, 0);
  std::vector<std::deque<long>> waiting(r);
  std::vector<char> busy(r, 0);
  std::vector<int> in_service_next(r, kExit);

  std::priority_queue<PendingEvent> pending;
  for (std::size_t i = 0; i < w.size(); ++i) {
    pending.push({epochs[i], entry_station[i], w.first() + static_cast<long>(i), false});
  }

  JacksonRun run{{}, -std::numeric_limits<double>::infinity(), 0.0};
  std::uint64_t events = 0;

  auto start_service = [&](std::size_t s, long customer, double now) {
    if (served[s] >= stacks[s].size()) throw std::logic_error("jackson: station stack exhausted");
    const auto& entry = stacks[s][served[s]++];
    busy[s] = 1;
    in_service_next[s] = entry.next;
    if (keep_log) run.log.push_back({now, JacksonEvent::Kind::service_start, static_cast<int>(s), customer});
    pending.push({now + entry.work, static_cast<int>(s), customer, true});
  };

  while (!pending.empty()) {
    if (++events > event_cap_) throw EventCapExceeded("jackson: window exceeded the event cap");
    const PendingEvent ev = pending.top();
    pending.pop();
    const auto s = static_cast<std::size_t>(ev.station);
    if (!ev.completion) {
      if (keep_log) run.log.push_back({ev.epoch, JacksonEvent::Kind::arrival, ev.station, ev.customer});
      if (!busy[s]) {
        start_service(s, ev.customer, ev.epoch);
      } else {
        waiting[s].push_back(ev.customer);
      }
      continue;
    }
    const int next = in_service_next[s];
    if (keep_log) run.log.push_back({ev.epoch, JacksonEvent::Kind::departure, ev.station, ev.customer});
    if (next == kExit) {
      run.last_activity = std::max(run.last_activity, ev.epoch);
      if (keep_log) run.log.push_back({ev.epoch, JacksonEvent::Kind::exit, ev.station, ev.customer});
    } else {
      pending.push({ev.epoch, next, ev.customer, false});
    }
    busy[s] = 0;
    if (!waiting[s].empty()) {
      const long customer = waiting[s].front();
      waiting[s].pop_front();
      start_service(s, customer, ev.epoch);
    }
  }
  run.maximal_dater = run.last_activity - epochs.back();
  return run;
}

double JacksonModel::evaluate(const RealizedWindow& w) const { return simulate(w, false).last_activity; }

}  // namespace msnet
