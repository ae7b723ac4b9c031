#include "netfuse/depstats.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

namespace netfuse {

namespace {

constexpr double kDenominatorGuard = 1e-12;

void require_same_rows(const SampleMatrix& x, const SampleMatrix& y) {
  if (!(x.rows == y.rows))
    throw Error(ErrorCode::RosterMismatch, "samples '" + x.name + "' and '" + y.name + "' have different row rosters");
}

void require_same_n(const DistanceMatrix& x, const DistanceMatrix& y) {
  if (x.n() != y.n())
    throw Error(ErrorCode::InvalidArgument,
                "distance matrices have " + std::to_string(x.n()) + " and " + std::to_string(y.n()) + " samples");
}

std::string label(const std::vector<std::string>& names, std::size_t i) {
  if (i < names.size() && !names[i].empty()) return names[i];
  return "#" + std::to_string(i);
}

class PartialRecursion {
 public:
  PartialRecursion(const Dense& r, const std::vector<std::size_t>& given, const std::vector<std::string>& names)
      : r_(r), given_(given), names_(names) {}

  double eval(std::size_t a, std::size_t b, std::size_t depth) {
    if (depth == 0) return r_(a, b);
    const auto key = std::make_tuple(std::min(a, b), std::max(a, b), depth);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    const std::size_t last = given_[depth - 1];
    const double r_ab = eval(a, b, depth - 1);
    const double r_al = eval(a, last, depth - 1);
    const double r_bl = eval(b, last, depth - 1);
    const double f_a = factor(r_al, a, last, depth - 1);
    const double f_b = factor(r_bl, b, last, depth - 1);
    const double v = (r_ab - r_al * r_bl) / (f_a * f_b);
    memo_.emplace(key, v);
    return v;
  }

 private:
  double factor(double r, std::size_t a, std::size_t l, std::size_t depth) const {
    const double f = std::sqrt(std::max(0.0, 1.0 - r * r));
    if (f < kDenominatorGuard) {
      std::string cond;
      for (std::size_t k = 0; k < depth; ++k) cond += (k ? "," : "") + label(names_, given_[k]);
      throw Error(ErrorCode::DegenerateConditioning,
                  "sqrt(1 - R*(" + label(names_, a) + "," + label(names_, l) + (depth ? " | " + cond : "") +
                      ")^2) < 1e-12; the conditioning matrix fully explains one side");
    }
    return f;
  }

  const Dense& r_;
  const std::vector<std::size_t>& given_;
  const std::vector<std::string>& names_;
  std::map<std::tuple<std::size_t, std::size_t, std::size_t>, double> memo_;
};

}  // namespace

std::string_view to_string(DcorKind kind) {
  switch (kind) {
    case DcorKind::Dcor: return "dcor";
    case DcorKind::DcorStar: return "dcor_star";
    case DcorKind::Pdcor: return "pdcor";
  }
  return "unknown";
}

SampleMatrix::SampleMatrix(NodeRoster rows_, Dense values_, std::string name_)
    : rows(std::move(rows_)), values(std::move(values_)), name(std::move(name_)) {
  if (static_cast<std::size_t>(values.rows()) != rows.size())
    throw Error(ErrorCode::InvalidArgument, "sample matrix '" + name + "' has " + std::to_string(values.rows()) +
                                                " rows but " + std::to_string(rows.size()) + " labels");
  for (Eigen::Index i = 0; i < values.rows(); ++i)
    for (Eigen::Index j = 0; j < values.cols(); ++j)
      if (!std::isfinite(values(i, j)))
        throw Error(ErrorCode::NonFiniteEntry, "sample matrix '" + name + "': entry (" + rows.id(i) + "," +
                                                   std::to_string(j) + ") is not finite");
}

SampleMatrix SampleMatrix::unlabeled(Dense values, std::string name) {
  std::vector<std::string> ids;
  ids.reserve(static_cast<std::size_t>(values.rows()));
  for (Eigen::Index i = 0; i < values.rows(); ++i) ids.push_back(std::to_string(i));
  return SampleMatrix(NodeRoster(std::move(ids)), std::move(values), std::move(name));
}

SampleMatrix SampleMatrix::from_similarity(const SimilarityMatrix& s, std::string name) {
  return SampleMatrix(s.roster(), s.values(), std::move(name));
}

DistanceMatrix rows_to_distance(const SampleMatrix& m) {
  // |xi - xj|^2 = |xi|^2 + |xj|^2 - 2 xi.xj on column-centred data
  const Dense x = m.values.rowwise() - m.values.colwise().mean();
  const Dense gram = x * x.transpose();
  const Eigen::Index n = x.rows();
  Dense d = Dense::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double v = std::sqrt(std::max(0.0, gram(i, i) + gram(j, j) - 2.0 * gram(i, j)));
      d(i, j) = v;
      d(j, i) = v;
    }
  return {std::move(d)};
}

DistanceMatrix distance_from_similarity(const SimilarityMatrix& s) {
  Dense d = (1.0 - s.values().array()).matrix();
  d.diagonal().setZero();
  return {std::move(d)};
}

Dense double_center(const DistanceMatrix& d) {
  const Eigen::Index n = d.values.rows();
  const Eigen::VectorXd row_mean = d.values.rowwise().mean();
  const double grand = row_mean.mean();
  Dense a(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = d.values(i, j) - row_mean(i) - row_mean(j) + grand;
  return a;
}

Dense u_center(const DistanceMatrix& d) {
  const Eigen::Index n = d.values.rows();
  if (n < 4) throw Error(ErrorCode::SampleTooSmall, "U-centring needs n >= 4, got " + std::to_string(n));
  const Eigen::VectorXd row_sum = d.values.rowwise().sum();
  const double total = row_sum.sum();
  const double nm2 = static_cast<double>(n - 2);
  const double grand = total / (static_cast<double>(n - 1) * nm2);
  Dense a(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      a(i, j) = i == j ? 0.0 : d.values(i, j) - row_sum(i) / nm2 - row_sum(j) / nm2 + grand;
  return a;
}

double u_inner(const Dense& a, const Dense& b) {
  const Eigen::Index n = a.rows();
  // diagonals of U-centred matrices are zero, so the full sum equals the off-diagonal one
  const double s = a.cwiseProduct(b).sum() - a.diagonal().dot(b.diagonal());
  return s / (static_cast<double>(n) * static_cast<double>(n - 3));
}

double dcor(const DistanceMatrix& x, const DistanceMatrix& y) {
  require_same_n(x, y);
  if (x.n() < 2) throw Error(ErrorCode::SampleTooSmall, "dcor needs n >= 2");
  const Dense a = double_center(x);
  const Dense b = double_center(y);
  const double vxy = a.cwiseProduct(b).mean();
  const double vxx = a.cwiseProduct(a).mean();
  const double vyy = b.cwiseProduct(b).mean();
  if (!(vxx > 0.0) || !(vyy > 0.0))
    throw Error(ErrorCode::DegenerateSample, "zero distance variance (all rows identical)");
  const double r2 = vxy / std::sqrt(vxx * vyy);
  return std::sqrt(std::clamp(r2, 0.0, 1.0));
}

DcorReport dcor(const SampleMatrix& x, const SampleMatrix& y) {
  require_same_rows(x, y);
  return {dcor(rows_to_distance(x), rows_to_distance(y)), DcorKind::Dcor, {}};
}

double dcor_star(const DistanceMatrix& x, const DistanceMatrix& y) {
  require_same_n(x, y);
  return dcor_star_matrix({&x, &y})(0, 1);
}

DcorReport dcor_star(const SampleMatrix& x, const SampleMatrix& y) {
  require_same_rows(x, y);
  return {dcor_star(rows_to_distance(x), rows_to_distance(y)), DcorKind::DcorStar, {}};
}

Dense dcor_star_matrix(const std::vector<const DistanceMatrix*>& ds) {
  const std::size_t k = ds.size();
  std::vector<Dense> u;
  u.reserve(k);
  for (const auto* d : ds) {
    if (d->n() != ds.front()->n()) throw Error(ErrorCode::InvalidArgument, "distance matrices differ in size");
    u.push_back(u_center(*d));
  }
  std::vector<double> self(k);
  for (std::size_t i = 0; i < k; ++i) {
    self[i] = u_inner(u[i], u[i]);
    if (!(self[i] > 0.0))
      throw Error(ErrorCode::DegenerateSample, "matrix " + std::to_string(i) + " has zero U-centred variance");
  }
  Dense r = Dense::Identity(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i + 1; j < k; ++j) {
      const double v = u_inner(u[i], u[j]) / std::sqrt(self[i] * self[j]);
      r(i, j) = v;
      r(j, i) = v;
    }
  return r;
}

double partial_from_correlations(const Dense& r, std::size_t a, std::size_t b, const std::vector<std::size_t>& given) {
  static const std::vector<std::string> kNoNames;
  PartialRecursion rec(r, given, kNoNames);
  return rec.eval(a, b, given.size());
}

double pdcor(const DistanceMatrix& x, const DistanceMatrix& y, const DistanceMatrix& z) {
  return pdcor_multi(x, y, {&z});
}

DcorReport pdcor(const SampleMatrix& x, const SampleMatrix& y, const SampleMatrix& z) {
  return pdcor_multi(x, y, std::vector<SampleMatrix>{z});
}

double pdcor_multi(const DistanceMatrix& x, const DistanceMatrix& y, const std::vector<const DistanceMatrix*>& given) {
  std::vector<const DistanceMatrix*> all{&x, &y};
  all.insert(all.end(), given.begin(), given.end());
  const Dense r = dcor_star_matrix(all);
  std::vector<std::size_t> idx;
  for (std::size_t k = 0; k < given.size(); ++k) idx.push_back(k + 2);
  return partial_from_correlations(r, 0, 1, idx);
}

DcorReport pdcor_multi(const SampleMatrix& x, const SampleMatrix& y, const std::vector<SampleMatrix>& given) {
  require_same_rows(x, y);
  for (const auto& g : given) require_same_rows(x, g);
  std::vector<DistanceMatrix> dist;
  dist.reserve(given.size() + 2);
  dist.push_back(rows_to_distance(x));
  dist.push_back(rows_to_distance(y));
  for (const auto& g : given) dist.push_back(rows_to_distance(g));
  std::vector<const DistanceMatrix*> ptrs;
  for (const auto& d : dist) ptrs.push_back(&d);
  const Dense r = dcor_star_matrix(ptrs);

  std::vector<std::string> names{x.name, y.name};
  std::vector<std::string> conditioned;
  std::vector<std::size_t> idx;
  for (std::size_t k = 0; k < given.size(); ++k) {
    names.push_back(given[k].name);
    conditioned.push_back(given[k].name);
    idx.push_back(k + 2);
  }
  PartialRecursion rec(r, idx, names);
  const double v = rec.eval(0, 1, idx.size());
  return {v, given.empty() ? DcorKind::DcorStar : DcorKind::Pdcor, std::move(conditioned)};
}

}  // namespace netfuse
