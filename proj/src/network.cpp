#include "invgan/network.hpp"

#include "invgan/format.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

namespace invgan {

Vec NetGradients::flat() const {
  std::size_t n = 0;
  for (std::size_t i = 0; i < dW.size(); ++i) n += static_cast<std::size_t>(dW[i].size() + db[i].size());
  Vec out(static_cast<Eigen::Index>(n));
  Eigen::Index k = 0;
  for (std::size_t i = 0; i < dW.size(); ++i) {
    for (Eigen::Index r = 0; r < dW[i].rows(); ++r)
      for (Eigen::Index c = 0; c < dW[i].cols(); ++c) out(k++) = dW[i](r, c);
    out.segment(k, db[i].size()) = db[i];
    k += db[i].size();
  }
  return out;
}

void NetGradients::add(const NetGradients& o) {
  for (std::size_t i = 0; i < dW.size(); ++i) {
    dW[i] += o.dW[i];
    db[i] += o.db[i];
  }
}

void NetGradients::scale(double s) {
  for (std::size_t i = 0; i < dW.size(); ++i) {
    dW[i] *= s;
    db[i] *= s;
  }
  dx *= s;
}

ReluNet::ReluNet(std::vector<int> widths) : widths_(std::move(widths)) {
  if (widths_.size() < 2) throw std::invalid_argument("a network needs at least input and output widths");
  for (int w : widths_)
    if (w < 1) throw std::invalid_argument("layer widths must be positive");
  for (std::size_t i = 0; i + 1 < widths_.size(); ++i) {
    weights_.push_back(Mat::Zero(widths_[i + 1], widths_[i]));
    biases_.push_back(Vec::Zero(widths_[i + 1]));
  }
}

ReluNet ReluNet::glorot(std::vector<int> widths, Rng& rng, std::optional<double> weight_bound) {
  ReluNet net(std::move(widths));
  for (std::size_t i = 0; i < net.layers(); ++i) {
    const double a = std::sqrt(6.0 / (net.widths_[i] + net.widths_[i + 1]));
    std::uniform_real_distribution<double> u(-a, a);
    for (Eigen::Index r = 0; r < net.weights_[i].rows(); ++r)
      for (Eigen::Index c = 0; c < net.weights_[i].cols(); ++c) net.weights_[i](r, c) = u(rng);
  }
  if (weight_bound) clip_weights(net, *weight_bound);
  return net;
}

Vec ReluNet::forward(const Vec& x) const {
  if (x.size() != input_dim()) throw std::invalid_argument("input dimension mismatch");
  return forward_batch(x);
}

Mat ReluNet::forward_batch(const Mat& x) const {
  if (x.rows() != input_dim()) throw std::invalid_argument("input dimension mismatch");
  Mat h = x;
  for (std::size_t i = 0; i < layers(); ++i) {
    Mat z = weights_[i] * h;
    z.colwise() += biases_[i];
    h = (i + 1 < layers()) ? Mat(z.cwiseMax(0.0)) : z;
  }
  return h;
}

NetGradients ReluNet::backward_batch(const Mat& x, const Mat& upstream) const {
  if (x.rows() != input_dim()) throw std::invalid_argument("input dimension mismatch");
  if (upstream.rows() != output_dim() || upstream.cols() != x.cols())
    throw std::invalid_argument("upstream gradient shape mismatch");
  const std::size_t nl = layers();
  std::vector<Mat> acts{x};  // input of each layer
  std::vector<Mat> pre;
  for (std::size_t i = 0; i < nl; ++i) {
    Mat z = weights_[i] * acts.back();
    z.colwise() += biases_[i];
    pre.push_back(z);
    if (i + 1 < nl) acts.push_back(z.cwiseMax(0.0));
  }
  NetGradients g;
  g.dW.resize(nl);
  g.db.resize(nl);
  Mat delta = upstream;
  for (std::size_t i = nl; i-- > 0;) {
    if (i + 1 < nl) delta = delta.cwiseProduct((pre[i].array() > 0.0).cast<double>().matrix());
    g.dW[i] = delta * acts[i].transpose();
    g.db[i] = delta.rowwise().sum();
    delta = weights_[i].transpose() * delta;
  }
  g.dx = delta;
  return g;
}

NetGradients ReluNet::backward(const Vec& x, const Vec& upstream) const {
  if (x.size() != input_dim() || upstream.size() != output_dim()) throw std::invalid_argument("dimension mismatch");
  return backward_batch(x, upstream);
}

std::size_t ReluNet::parameter_count() const {
  std::size_t n = 0;
  for (std::size_t i = 0; i < layers(); ++i) n += static_cast<std::size_t>(weights_[i].size() + biases_[i].size());
  return n;
}

Vec ReluNet::parameters() const {
  NetGradients tmp;
  tmp.dW = weights_;
  tmp.db = biases_;
  return tmp.flat();
}

void ReluNet::set_parameters(const Vec& p) {
  if (static_cast<std::size_t>(p.size()) != parameter_count()) throw std::invalid_argument("parameter count mismatch");
  Eigen::Index k = 0;
  for (std::size_t i = 0; i < layers(); ++i) {
    for (Eigen::Index r = 0; r < weights_[i].rows(); ++r)
      for (Eigen::Index c = 0; c < weights_[i].cols(); ++c) weights_[i](r, c) = p(k++);
    biases_[i] = p.segment(k, biases_[i].size());
    k += biases_[i].size();
  }
}

double ReluNet::max_abs_entry() const {
  double m = 0.0;
  for (std::size_t i = 0; i < layers(); ++i)
    m = std::max({m, weights_[i].cwiseAbs().maxCoeff(), biases_[i].cwiseAbs().maxCoeff()});
  return m;
}

void clip_weights(ReluNet& net, double k) {
  if (!(k > 0.0)) throw std::invalid_argument("weight bound must be positive");
  for (std::size_t i = 0; i < net.layers(); ++i) {
    net.weight(i) = net.weight(i).cwiseMax(-k).cwiseMin(k);
    net.bias(i) = net.bias(i).cwiseMax(-k).cwiseMin(k);
  }
  net.set_weight_bound(k);
}

std::string to_string(DiscMode m) { return m == DiscMode::orbit_average ? "orbit_average" : "input_average"; }

DiscMode disc_mode_from_string(const std::string& s) {
  if (s == "orbit_average") return DiscMode::orbit_average;
  if (s == "input_average") return DiscMode::input_average;
  throw std::invalid_argument("unknown discriminator mode '" + s + "'");
}

InvariantDiscriminator::InvariantDiscriminator(ReluNet base, FiniteGroup group, DiscMode mode)
    : base_(std::move(base)), group_(std::move(group)), mode_(mode) {
  if (base_.output_dim() != 1) throw std::invalid_argument("discriminator base must have scalar output");
  if (base_.input_dim() != group_.dim()) throw std::invalid_argument("discriminator input does not match group");
  for (std::size_t i = 0; i < group_.order(); ++i) inverse_mats_.push_back(group_.element(group_.inverse(i)).matrix);
  w_sigma_ = group_.average_matrix();
}

Mat InvariantDiscriminator::expand(const Mat& x) const {
  const Eigen::Index b = x.cols();
  Mat all(x.rows(), b * static_cast<Eigen::Index>(inverse_mats_.size()));
  for (std::size_t i = 0; i < inverse_mats_.size(); ++i)
    all.middleCols(static_cast<Eigen::Index>(i) * b, b) = inverse_mats_[i] * x;
  return all;
}

double InvariantDiscriminator::forward(const Vec& x) const {
  if (x.size() != group_.dim()) throw std::invalid_argument("input dimension mismatch");
  return forward_batch(x)(0);
}

Vec InvariantDiscriminator::forward_batch(const Mat& x) const {
  if (x.rows() != group_.dim()) throw std::invalid_argument("input dimension mismatch");
  if (mode_ == DiscMode::input_average) return base_.forward_batch(w_sigma_ * x).row(0).transpose();
  const Eigen::Index b = x.cols();
  const Mat out = base_.forward_batch(expand(x));
  Vec acc = Vec::Zero(b);
  for (std::size_t i = 0; i < inverse_mats_.size(); ++i)
    acc += out.block(0, static_cast<Eigen::Index>(i) * b, 1, b).transpose();
  return acc / static_cast<double>(inverse_mats_.size());
}

NetGradients InvariantDiscriminator::backward_batch(const Mat& x, const Vec& upstream) const {
  if (x.rows() != group_.dim() || upstream.size() != x.cols()) throw std::invalid_argument("dimension mismatch");
  if (mode_ == DiscMode::input_average) {
    NetGradients g = base_.backward_batch(w_sigma_ * x, upstream.transpose());
    g.dx = w_sigma_.transpose() * g.dx;
    return g;
  }
  const Eigen::Index b = x.cols();
  const auto k = static_cast<Eigen::Index>(inverse_mats_.size());
  Mat up(1, b * k);
  for (Eigen::Index i = 0; i < k; ++i) up.middleCols(i * b, b) = upstream.transpose() / static_cast<double>(k);
  NetGradients g = base_.backward_batch(expand(x), up);
  Mat dx = Mat::Zero(x.rows(), b);
  for (Eigen::Index i = 0; i < k; ++i)
    dx += inverse_mats_[static_cast<std::size_t>(i)].transpose() * g.dx.middleCols(i * b, b);
  g.dx = std::move(dx);
  return g;
}

InvariantGenerator::InvariantGenerator(ReluNet base, FiniteGroup group)
    : base_(std::move(base)), group_(std::move(group)) {
  if (base_.input_dim() != 1) throw std::invalid_argument("generator base must take a scalar latent");
  if (base_.output_dim() != group_.dim()) throw std::invalid_argument("generator output does not match group");
}

Vec InvariantGenerator::generate(double z, Rng& rng) const {
  Vec zz(1);
  zz(0) = z;
  return apply(haar_sample(group_, rng), base_.forward(zz));
}

Mat InvariantGenerator::generate_batch(const Vec& z, Rng& rng, std::vector<std::size_t>* sigmas) const {
  std::vector<std::size_t> s(static_cast<std::size_t>(z.size()));
  for (auto& v : s) v = haar_sample_index(group_, rng);
  Mat out = generate_with(z, s);
  if (sigmas) *sigmas = std::move(s);
  return out;
}

Mat InvariantGenerator::generate_with(const Vec& z, const std::vector<std::size_t>& sigmas) const {
  if (static_cast<Eigen::Index>(sigmas.size()) != z.size()) throw std::invalid_argument("one element per latent needed");
  Mat base_out = base_.forward_batch(z.transpose());
  for (Eigen::Index j = 0; j < z.size(); ++j)
    base_out.col(j) = group_.element(sigmas[static_cast<std::size_t>(j)]).matrix * base_out.col(j);
  return base_out;
}

TransportMap::TransportMap(std::vector<double> breakpoints, Cloud targets)
    : breakpoints_(std::move(breakpoints)), targets_(std::move(targets)) {
  if (targets_.cols() < 1) throw std::invalid_argument("transport map needs at least one target");
  if (breakpoints_.size() != 2 * static_cast<std::size_t>(targets_.cols() - 1))
    throw std::invalid_argument("need 2m breakpoints for m+1 targets");
  if (!std::is_sorted(breakpoints_.begin(), breakpoints_.end())) throw std::invalid_argument("breakpoints must increase");
}

Vec TransportMap::operator()(double z) const {
  const std::size_t m = static_cast<std::size_t>(targets_.cols() - 1);
  if (m == 0) return targets_.col(0);
  // Number of breakpoints <= z decides the piece.
  const auto k = static_cast<std::size_t>(std::upper_bound(breakpoints_.begin(), breakpoints_.end(), z) - breakpoints_.begin());
  if (k == 0) return targets_.col(0);
  if (k == 2 * m) return targets_.col(static_cast<Eigen::Index>(m));
  const std::size_t i = (k + 1) / 2;  // segment/plateau index
  if (k % 2 == 1) {
    const double lo = breakpoints_[k - 1], hi = breakpoints_[k];
    const double t = (z - lo) / (hi - lo);
    return (1.0 - t) * targets_.col(static_cast<Eigen::Index>(i - 1)) + t * targets_.col(static_cast<Eigen::Index>(i));
  }
  return targets_.col(static_cast<Eigen::Index>(k / 2));
}

Cloud TransportMap::evaluate(const Vec& z) const {
  Cloud out(targets_.rows(), z.size());
  for (Eigen::Index j = 0; j < z.size(); ++j) out.col(j) = (*this)(z(j));
  return out;
}

std::vector<double> TransportMap::plateau_midpoints() const {
  const std::size_t m = static_cast<std::size_t>(targets_.cols() - 1);
  std::vector<double> mids;
  if (m == 0) return {0.0};
  mids.push_back(breakpoints_[0] - 1.0);
  for (std::size_t i = 1; i < m; ++i) mids.push_back(0.5 * (breakpoints_[2 * i - 1] + breakpoints_[2 * i]));
  mids.push_back(breakpoints_.back() + 1.0);
  return mids;
}

TransportMap build_transport_map(const Cloud& points, const std::function<double(double)>& quantile, double eps) {
  if (points.cols() < 1) throw std::invalid_argument("no target points");
  if (!(eps > 0.0)) throw std::invalid_argument("epsilon must be positive");
  const double n = static_cast<double>(points.cols());

  // Merge duplicates, keeping first-occurrence order.
  std::vector<Eigen::Index> reps;
  std::vector<double> w;
  for (Eigen::Index j = 0; j < points.cols(); ++j) {
    bool merged = false;
    for (std::size_t r = 0; r < reps.size(); ++r) {
      if ((points.col(reps[r]) - points.col(j)).norm() <= kMatchTol) {
        w[r] += 1.0 / n;
        merged = true;
        break;
      }
    }
    if (!merged) {
      reps.push_back(j);
      w.push_back(1.0 / n);
    }
  }
  Cloud targets(points.rows(), static_cast<Eigen::Index>(reps.size()));
  for (std::size_t r = 0; r < reps.size(); ++r) targets.col(static_cast<Eigen::Index>(r)) = points.col(reps[r]);
  const std::size_t m = reps.size() - 1;

  std::vector<double> cum;  // cumulative source mass at each breakpoint
  Vec weights = Eigen::Map<Vec>(w.data(), static_cast<Eigen::Index>(w.size()));
  if (m > 0) {
    double c = w[0];
    for (std::size_t i = 1; i <= m; ++i) {
      const double gap = (targets.col(static_cast<Eigen::Index>(i)) - targets.col(static_cast<Eigen::Index>(i - 1))).norm();
      if (!(eps < static_cast<double>(m) * w[i] * gap))
        throw std::invalid_argument("epsilon too large for the gap between targets " + std::to_string(i - 1) + " and " +
                                    std::to_string(i));
      const double seg = eps / (static_cast<double>(m) * gap);
      cum.push_back(c);
      c += seg;
      cum.push_back(c);
      c += w[i] - seg;
    }
  }

  std::vector<double> bps;
  for (double c : cum) {
    const double z = quantile(c);
    if (!std::isfinite(z)) throw std::invalid_argument("quantile returned a non-finite value");
    if (!bps.empty() && !(z > bps.back())) throw std::invalid_argument("quantile function is not increasing");
    bps.push_back(z);
  }
  // Spot-check monotonicity on a grid as well.
  double prev = quantile(0.5 / 1024);
  for (int k = 1; k < 1024; ++k) {
    const double v = quantile((k + 0.5) / 1024);
    if (v < prev) throw std::invalid_argument("quantile function is not monotone");
    prev = v;
  }

  TransportMap map(std::move(bps), std::move(targets));
  map.weights_ = std::move(weights);
  return map;
}

bool transport_capacity_check(long width, long depth, long n, long d) {
  if (width < 7 * d + 1 || depth < 2) return false;
  const double free = static_cast<double>(width - d - 1);
  const double cap = free / 2.0 * std::floor(free / (6.0 * static_cast<double>(d))) * std::floor(depth / 2.0) + 2.0;
  return static_cast<double>(n) <= cap;
}

void save_checkpoint(std::ostream& os, const ReluNet& net, const CheckpointMeta& meta) {
  nlohmann::json h;
  h["format"] = "invgan-relu-net";
  h["version"] = 1;
  h["widths"] = net.widths();
  h["K"] = net.weight_bound() ? nlohmann::json(*net.weight_bound()) : nlohmann::json(nullptr);
  h["mode"] = meta.mode;
  h["group"] = meta.group;
  os << h.dump() << '\n';
  auto row = [&os](const double* data, Eigen::Index n) {
    for (Eigen::Index k = 0; k < n; ++k) os << (k ? " " : "") << fmt_double(data[k]);
    os << '\n';
  };
  for (std::size_t i = 0; i < net.layers(); ++i) {
    const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = net.weight(i);
    row(rm.data(), rm.size());
    row(net.bias(i).data(), net.bias(i).size());
  }
}

ReluNet load_checkpoint(std::istream& is, CheckpointMeta* meta) {
  std::string line;
  if (!std::getline(is, line)) throw std::invalid_argument("empty checkpoint");
  const auto h = nlohmann::json::parse(line);
  if (h.value("format", "") != "invgan-relu-net" || h.value("version", 0) != 1)
    throw std::invalid_argument("not an invgan network checkpoint");
  ReluNet net(h.at("widths").get<std::vector<int>>());
  if (!h.at("K").is_null()) net.set_weight_bound(h.at("K").get<double>());
  if (meta) {
    meta->mode = h.value("mode", "");
    meta->group = h.value("group", "");
  }
  auto read_row = [&is, &line](double* out, Eigen::Index n) {
    if (!std::getline(is, line)) throw std::invalid_argument("truncated checkpoint");
    std::istringstream ss(line);
    std::string tok;
    Eigen::Index k = 0;
    while (ss >> tok) {
      if (k >= n) throw std::invalid_argument("checkpoint row too long");
      out[k++] = parse_double(tok);
    }
    if (k != n) throw std::invalid_argument("checkpoint row too short");
  };
  for (std::size_t i = 0; i < net.layers(); ++i) {
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm(net.weight(i).rows(), net.weight(i).cols());
    read_row(rm.data(), rm.size());
    net.weight(i) = rm;
    read_row(net.bias(i).data(), net.bias(i).size());
  }
  return net;
}

}  // namespace invgan
