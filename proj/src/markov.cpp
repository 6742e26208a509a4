#include "selberg/markov.hpp"

#include <algorithm>
#include <stdexcept>

namespace selberg::markov {

int position(int label, int kappa) {
  if (label == 0 || label > kappa || label < -kappa) throw std::out_of_range("interval label out of range");
  return label > 0 ? label - 1 : kappa - label - 1;
}

int label_at(int pos, int kappa) { return pos < kappa ? pos + 1 : -(pos - kappa + 1); }

std::vector<int> labels(int kappa) {
  std::vector<int> out;
  for (int p = 0; p < 2 * kappa; ++p) out.push_back(label_at(p, kappa));
  return out;
}

// ---------------------------------------------------------------------------

Real Partition::left(int j) const { return j > 0 ? phi[j - 1] : -phi[-j]; }

Real Partition::right(int j) const { return j > 0 ? phi[j] : -phi[-j - 1]; }

int Partition::locate(const Real& x) const {
  if (x.is_zero()) return 0;
  if (x.sign() > 0) return -locate(-x);
  if (x < phi.front()) return 0;
  for (int j = 1; j <= kappa; ++j)
    if (x < phi[j]) return j;
  return 0;
}

Partition build_partition(const GroupParams& g) {
  const mpfr_prec_t bits = g.bits();
  Real tol = hecke::default_tolerance(bits);
  Real x = -g.lambda / 2L;
  std::vector<Real> points{x};
  for (int step = 1; step < g.kappa; ++step) {
    x = hecke::fq_step(x, g).x;
    if (mp::abs(x) < tol) throw std::logic_error("orbit of -lambda/2 reached 0 before kappa steps");
    points.push_back(-mp::abs(x));
  }
  if (g.kappa >= 1) {
    Real last = hecke::fq_step(x, g).x;
    if (!(mp::abs(last) < tol)) throw std::logic_error("orbit of -lambda/2 does not close at 0 after kappa steps");
  }
  std::sort(points.begin(), points.end(), [](const Real& a, const Real& b) { return a < b; });
  for (std::size_t k = 1; k < points.size(); ++k)
    if (!(points[k] - points[k - 1] > tol)) throw std::logic_error("partition endpoints are not distinct");
  points.emplace_back(0L, bits);
  return {g.kappa, std::move(points)};
}

// ---------------------------------------------------------------------------

bool TransitionSet::contains(long n) const {
  switch (kind) {
    case SetKind::Empty: return false;
    case SetKind::Single: return n == n0;
    case SetKind::Ray: return n >= n0;
    case SetKind::NegSingle: return n == -n0;
    case SetKind::NegRay: return n <= -n0;
  }
  return false;
}

TransitionSet TransitionSet::negated() const {
  switch (kind) {
    case SetKind::Empty: return *this;
    case SetKind::Single: return {SetKind::NegSingle, n0};
    case SetKind::Ray: return {SetKind::NegRay, n0};
    case SetKind::NegSingle: return {SetKind::Single, n0};
    case SetKind::NegRay: return {SetKind::Ray, n0};
  }
  return *this;
}

std::string TransitionSet::to_string() const {
  switch (kind) {
    case SetKind::Empty: return "{}";
    case SetKind::Single: return "{" + std::to_string(n0) + "}";
    case SetKind::Ray: return "Z>=" + std::to_string(n0);
    case SetKind::NegSingle: return "{-" + std::to_string(n0) + "}";
    case SetKind::NegRay: return "-Z>=" + std::to_string(n0);
  }
  return "?";
}

NijTable::NijTable(int kappa) : kappa_(kappa), sets_(static_cast<std::size_t>(4 * kappa * kappa)) {}

const TransitionSet& NijTable::at(int i, int j) const {
  return sets_[static_cast<std::size_t>(position(i, kappa_) * 2 * kappa_ + position(j, kappa_))];
}

void NijTable::set(int i, int j, TransitionSet s) {
  sets_[static_cast<std::size_t>(position(i, kappa_) * 2 * kappa_ + position(j, kappa_))] = s;
}

void NijTable::set_mirrored(int i, int j, TransitionSet s) {
  set(i, j, s);
  set(-i, -j, s.negated());
}

NijTable build_nij(const GroupParams& g) {
  NijTable t(g.kappa);
  const int h = g.h;
  const auto one = TransitionSet::single(1);
  if (g.even()) {
    t.set_mirrored(1, h, TransitionSet::ray_from(2));
    t.set_mirrored(-1, h, TransitionSet::ray_from(1));
    for (int i = 2; i <= h; ++i) {
      t.set_mirrored(i, i - 1, one);
      t.set_mirrored(i, h, TransitionSet::ray_from(2));
      t.set_mirrored(-i, h, TransitionSet::ray_from(1));
    }
    return t;
  }
  const int top = 2 * h + 1;
  if (h >= 1) {
    t.set_mirrored(1, 2 * h, TransitionSet::single(2));
    t.set_mirrored(-1, 2 * h, one);
    t.set_mirrored(-2, 2 * h, one);
    t.set_mirrored(2, top, TransitionSet::ray_from(2));
    t.set_mirrored(-2, top, TransitionSet::ray_from(2));
  }
  t.set_mirrored(1, top, TransitionSet::ray_from(3));
  t.set_mirrored(-1, top, TransitionSet::ray_from(2));
  for (int i = 3; i <= top; ++i) {
    t.set_mirrored(i, i - 2, one);
    t.set_mirrored(-i, 2 * h, one);
    t.set_mirrored(i, top, TransitionSet::ray_from(2));
    t.set_mirrored(-i, top, TransitionSet::ray_from(2));
  }
  return t;
}

// ---------------------------------------------------------------------------

namespace {

struct Image {
  Real lo, hi;
};

Image branch_image(const GroupParams& g, const Partition& p, int i, long n) {
  Real a = hecke::MoebiusMap::ST(n, g).apply(p.left(i));
  Real b = hecke::MoebiusMap::ST(n, g).apply(p.right(i));
  if (b < a) std::swap(a, b);
  return {std::move(a), std::move(b)};
}

bool contained(const Image& img, const Partition& p, int j, const Real& tol) {
  return img.lo >= p.left(j) - tol && img.hi <= p.right(j) + tol;
}

}  // namespace

ValidationReport validate(const GroupParams& g, const Partition& p, const NijTable& t, long n_max) {
  if (n_max < 3) throw std::invalid_argument("validate: n_max must be at least 3");
  ValidationReport report;
  const mpfr_prec_t bits = g.bits();
  Real tol = hecke::default_tolerance(bits);
  const auto all = labels(g.kappa);

  // containment for listed digits
  for (int i : all) {
    for (int j : all) {
      const TransitionSet& s = t.at(i, j);
      if (s.empty()) continue;
      for (long m = 1; m <= n_max; ++m) {
        long n = s.negative() ? -m : m;
        if (!s.contains(n)) continue;
        ++report.containment_checks;
        if (!contained(branch_image(g, p, i, n), p, j, tol))
          report.violations.push_back({i, j, n, "S T^n I_i not inside closure of I_j"});
      }
    }
  }

  // completeness on an interior grid of each interval
  constexpr int kGrid = 9;
  Real lambda_half = g.lambda / 2L;
  for (int i : all) {
    Real lo = p.left(i), width = p.right(i) - p.left(i);
    for (int k = 0; k < kGrid; ++k) {
      Real y = lo + width * (2L * k + 1) / (2L * kGrid);
      for (long n = -n_max; n <= n_max; ++n) {
        if (n == 0) continue;
        Real x = hecke::MoebiusMap::ST(n, g).apply(y);
        if (!(mp::abs(x) < lambda_half - tol)) continue;
        int j = p.locate(x);
        ++report.completeness_checks;
        if (j == 0 || !t.at(i, j).contains(n))
          report.violations.push_back({i, j, n, "inverse branch missing from N_ij"});
      }
    }
  }

  // Markov property: endpoints map onto endpoints
  std::vector<Real> targets;
  for (const Real& e : p.phi) {
    targets.push_back(e);
    targets.push_back(-e);
  }
  targets.push_back(lambda_half);
  for (std::size_t k = 0; k + 1 < p.phi.size(); ++k) {
    for (int sign : {1, -1}) {
      Real e = p.phi[k] * static_cast<long>(sign);
      Real image = hecke::fq_step(e, g).x;
      bool hit = std::any_of(targets.begin(), targets.end(), [&](const Real& v) { return mp::abs(v - image) < tol; });
      if (!hit) report.violations.push_back({0, 0, 0, "F_q endpoint image is not an endpoint"});
    }
  }
  return report;
}

NijTable derive_nij(const GroupParams& g, const Partition& p, long n_max) {
  NijTable t(g.kappa);
  Real tol = hecke::default_tolerance(g.bits());
  const auto all = labels(g.kappa);
  for (int i : all) {
    for (int j : all) {
      std::vector<long> admissible;
      for (long m = 1; m <= n_max; ++m)
        for (long n : {m, -m})
          if (contained(branch_image(g, p, i, n), p, j, tol)) admissible.push_back(n);
      if (admissible.empty()) continue;
      bool positive = admissible.front() > 0;
      for (long n : admissible)
        if ((n > 0) != positive) throw std::logic_error("derive_nij: mixed-sign digit set");
      std::vector<long> mags;
      for (long n : admissible) mags.push_back(n > 0 ? n : -n);
      std::sort(mags.begin(), mags.end());
      TransitionSet s;
      if (mags.size() == 1 && mags.front() < n_max) {
        s = TransitionSet{SetKind::Single, mags.front()};
      } else {
        bool run = mags.back() == n_max && mags.back() - mags.front() + 1 == static_cast<long>(mags.size());
        if (!run) throw std::logic_error("derive_nij: digit set is neither singleton nor ray");
        s = TransitionSet{SetKind::Ray, mags.front()};
      }
      t.set(i, j, positive ? s : s.negated());
    }
  }
  return t;
}

nlohmann::json to_json(const GroupParams& g, const Partition& p, const NijTable& t, int digits) {
  nlohmann::json out;
  out["q"] = g.q;
  out["kappa"] = g.kappa;
  out["precision_digits"] = digits;
  out["lambda"] = mp::to_string(g.lambda, digits);
  auto& endpoints = out["endpoints"] = nlohmann::json::array();
  for (const Real& e : p.phi) endpoints.push_back(mp::to_string(e, digits));
  auto& sets = out["transitions"] = nlohmann::json::array();
  for (int i : labels(g.kappa)) {
    for (int j : labels(g.kappa)) {
      const TransitionSet& s = t.at(i, j);
      if (s.empty()) continue;
      const char* kind = s.ray() ? (s.negative() ? "neg-ray" : "ray") : (s.negative() ? "neg-singleton" : "singleton");
      sets.push_back({{"i", i}, {"j", j}, {"kind", kind}, {"n0", s.n0}});
    }
  }
  return out;
}

}  // namespace selberg::markov
