#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "smrs/reference.hpp"
#include "smrs/solver.hpp"
#include "smrs/spectral.hpp"
#include "smrs/support.hpp"

using namespace smrs;

namespace {

struct Instance {
  SpectrumGrid truth;
  SupportMask mask;
  ReducedSystem red;
  std::vector<Block> blocks;
};

// Fold, detect and reduce; an explicit mask overrides detection
// (the known-band-locations path).
Instance make_instance(const std::vector<ChannelConfig>& chans,
                       const SpectrumGrid& x,
                       const std::vector<int>* known_support = nullptr) {
  Instance ins;
  ins.truth = x;
  std::vector<ChannelSamples> samples;
  for (const auto& ch : chans) samples.push_back(fold_spectrum(x, ch));

  const DetectorConfig det;
  if (known_support) {
    ins.mask.m_total = x.m_total;
    ins.mask.signed_grid = x.signed_grid;
    ins.mask.mask.assign(static_cast<std::size_t>(x.storage_size()), 0);
    for (int k : *known_support)
      ins.mask.mask[static_cast<std::size_t>(k - x.lo())] = 1;
    ins.mask.recompute_blocks();
  } else {
    std::vector<std::vector<std::uint8_t>> inds;
    for (const auto& s : samples)
      inds.push_back(channel_indicator(s, det, x.m_total));
    ins.mask = intersect_indicators(inds, x.m_total, x.signed_grid);
  }

  FoldingMatrix fm;
  fm.channels = chans;
  fm.m_total = x.m_total;
  fm.signed_grid = x.signed_grid;
  ins.red = reduce_system(fm, samples, ins.mask, det);
  ins.blocks = reduced_blocks(ins.mask, ins.red.column_map);
  return ins;
}

const std::vector<ChannelConfig> kPair46{{4, 4.0}, {6, 6.0}};

} // namespace

TEST_CASE("the two-unknown system is well posed and solves exactly") {
  const cdouble a{0.7, -0.3}, b{1.2, 0.5};
  const SpectrumGrid x = test::grid_with(1.0, 12, false, {{1, a}, {9, b}});
  const std::vector<int> support{1, 9};
  const Instance ins = make_instance(kPair46, x, &support);

  const SolveConfig cfg;
  CHECK(classify_posedness(ins.red, cfg) == Posedness::well_posed);

  const SolveOutcome out = solve_direct(ins.red, cfg);
  CHECK(out.posedness == Posedness::well_posed);
  REQUIRE(out.solution.size() == 2);
  CHECK(std::abs(out.solution(0) - a) < 1e-12);
  CHECK(std::abs(out.solution(1) - b) < 1e-12);
  CHECK(out.residual_norm <= 1e-10 * ins.red.rhs.norm());
}

TEST_CASE("duplicate columns are classified ill posed") {
  // lcm(2,4) = 4 < 8, so bins 1 and 5 share a column pattern
  const std::vector<ChannelConfig> chans{{2, 2.0}, {4, 4.0}};
  const SpectrumGrid x =
      test::grid_with(1.0, 8, false, {{1, {1.0, 0.0}}});
  const std::vector<int> support{1, 5};
  const Instance ins = make_instance(chans, x, &support);
  CHECK(classify_posedness(ins.red, SolveConfig{}) == Posedness::ill_posed);
  CHECK(condition_diagnostics(ins.red) ==
        std::numeric_limits<double>::infinity());
}

TEST_CASE("unaliased band solves as a scaled copy") {
  std::mt19937_64 rng(3);
  SpectrumGrid x = SpectrumGrid::zeros(1.0, 8, false);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int k = 2; k <= 4; ++k) x.at(k) = cdouble{g(rng), g(rng)};
  const std::vector<ChannelConfig> chans{{8, 8.0}};
  const Instance ins = make_instance(chans, x);

  const SolveOutcome out = solve_direct(ins.red, SolveConfig{});
  for (std::size_t c = 0; c < ins.red.column_map.size(); ++c) {
    const int k = ins.red.column_map[c];
    CHECK(std::abs(out.solution(static_cast<Eigen::Index>(c)) - x.at(k)) < 1e-12);
  }
  CHECK(out.residual_norm < 1e-12 * ins.red.rhs.norm());
}

TEST_CASE("direct solve minimizes least squares under noise") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> sig(0.0, 1.0);
  int tested = 0;
  for (int attempt = 0; attempt < 200 && tested < 10; ++attempt) {
    SpectrumGrid x = SpectrumGrid::zeros(1.0, 24, false);
    std::uniform_int_distribution<int> pos(0, 23);
    for (int i = 0; i < 3; ++i) x.at(pos(rng)) = cdouble{sig(rng), sig(rng)};
    const std::vector<ChannelConfig> chans{{4, 4.0}, {6, 6.0}, {5, 5.0}};
    Instance ins = make_instance(chans, x);
    if (ins.red.empty()) continue;
    // perturb the rhs so the system is inconsistent
    std::normal_distribution<double> g(0.0, 0.05);
    for (Eigen::Index i = 0; i < ins.red.rhs.size(); ++i)
      ins.red.rhs(i) += cdouble{g(rng), g(rng)};

    const SolveOutcome out = solve_direct(ins.red, SolveConfig{});
    if (out.posedness != Posedness::well_posed) continue;
    ++tested;
    // independent route: normal equations
    const Eigen::MatrixXd at_a = ins.red.matrix.transpose() * ins.red.matrix;
    Eigen::MatrixXd b(ins.red.rhs.size(), 2);
    b.col(0) = ins.red.rhs.real();
    b.col(1) = ins.red.rhs.imag();
    const Eigen::MatrixXd atb = ins.red.matrix.transpose() * b;
    const Eigen::MatrixXd xn = at_a.ldlt().solve(atb);
    for (Eigen::Index i = 0; i < xn.rows(); ++i) {
      CHECK(std::abs(out.solution(i).real() - xn(i, 0)) < 1e-8);
      CHECK(std::abs(out.solution(i).imag() - xn(i, 1)) < 1e-8);
    }
  }
  CHECK(tested >= 5);
}

TEST_CASE("pseudo-inverse reproduces consistent right-hand sides") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g(0.0, 1.0);
  int tested = 0;
  for (int attempt = 0; attempt < 500 && tested < 30; ++attempt) {
    SpectrumGrid x = SpectrumGrid::zeros(1.0, 22, false);
    std::uniform_int_distribution<int> pos(0, 21);
    for (int i = 0; i < 4; ++i) x.at(pos(rng)) = cdouble{g(rng), g(rng)};
    const std::vector<ChannelConfig> chans{{5, 5.0}, {7, 7.0}};
    const Instance ins = make_instance(chans, x);
    if (ins.red.empty()) continue;
    const SolveOutcome out = solve_direct(ins.red, SolveConfig{});
    if (out.posedness != Posedness::well_posed) continue;
    Eigen::VectorXcd ax = Eigen::VectorXcd::Zero(ins.red.rhs.size());
    for (Eigen::Index r = 0; r < ins.red.matrix.rows(); ++r)
      for (Eigen::Index c = 0; c < ins.red.matrix.cols(); ++c)
        ax(r) += ins.red.matrix(r, c) * out.solution(c);
    CHECK((ax - ins.red.rhs).norm() <= 1e-9 * ins.red.rhs.norm());
    ++tested;
  }
  CHECK(tested >= 10);
}

TEST_CASE("greedy blocks select exactly the true bands") {
  std::mt19937_64 rng(11);
  SpectrumGrid x = SpectrumGrid::zeros(1.0, 24, false);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int k : {2, 3, 14, 15}) x.at(k) = cdouble{g(rng), g(rng)};
  const std::vector<ChannelConfig> chans{{4, 4.0}, {7, 7.0}}; // lcm 28 > 24
  const std::vector<int> support{2, 3, 14, 15};
  const Instance ins = make_instance(chans, x, &support);
  REQUIRE(ins.blocks.size() == 2);

  SolveConfig cfg;
  cfg.omp_threshold = 1e-20;
  const SolveOutcome out = block_omp(ins.red, ins.blocks, cfg);
  CHECK(out.converged);
  CHECK(out.iterations == 2);
  CHECK(out.residual_norm * out.residual_norm <= 1e-20);
  for (std::size_t c = 0; c < ins.red.column_map.size(); ++c)
    CHECK(std::abs(out.solution(static_cast<Eigen::Index>(c)) -
                   x.at(ins.red.column_map[c])) < 1e-9);
}

TEST_CASE("a single all-covering block degenerates to the direct solve") {
  const cdouble a{0.7, -0.3}, b{1.2, 0.5};
  const SpectrumGrid x = test::grid_with(1.0, 12, false, {{1, a}, {9, b}});
  const std::vector<int> support{1, 9};
  Instance ins = make_instance(kPair46, x, &support);
  const std::vector<Block> one{{0, ins.red.cols()}};

  const SolveOutcome omp = block_omp(ins.red, one, SolveConfig{});
  const SolveOutcome direct = solve_direct(ins.red, SolveConfig{});
  CHECK(omp.iterations == 1);
  CHECK(omp.converged);
  for (Eigen::Index i = 0; i < omp.solution.size(); ++i)
    CHECK(std::abs(omp.solution(i) - direct.solution(i)) < 1e-12);
}

TEST_CASE("a false band built from true columns can win the greedy search") {
  // With channels (4, 6) on M = 12 the column patterns satisfy
  // c(0) + c(10) = c(4) + c(6), so the support {4, 6} admits the imposter
  // {0, 10}. Equal unit amplitudes tie every first step and the tie break
  // walks into the wrong pair, which still explains the data exactly.
  SpectrumGrid x = SpectrumGrid::zeros(1.0, 12, false);
  x.at(4) = cdouble{1.0, 0.0};
  x.at(6) = cdouble{1.0, 0.0};
  const Instance ins = make_instance(kPair46, x);
  REQUIRE(ins.red.cols() == 4);
  CHECK(ins.red.column_map == std::vector<int>{0, 4, 6, 10});
  CHECK(classify_posedness(ins.red, SolveConfig{}) == Posedness::ill_posed);

  const SolveOutcome out = block_omp(ins.red, ins.blocks, SolveConfig{});
  CHECK(out.converged); // residual vanished ...
  CHECK(out.residual_norm * out.residual_norm <= 1e-20);
  double err = 0.0;
  for (std::size_t c = 0; c < ins.red.column_map.size(); ++c)
    err = std::max(err, std::abs(out.solution(static_cast<Eigen::Index>(c)) -
                                 x.at(ins.red.column_map[c])));
  CHECK(err > 0.5); // ... but the reconstruction is wrong
}

TEST_CASE("ties resolve to the lowest block index") {
  // identical columns at bins 1 and 5 (lcm 4 < 8)
  const std::vector<ChannelConfig> chans{{2, 2.0}, {4, 4.0}};
  const SpectrumGrid x = test::grid_with(1.0, 8, false, {{1, {1.0, 0.5}}});
  const std::vector<int> support{1, 5};
  const Instance ins = make_instance(chans, x, &support);
  REQUIRE(ins.blocks.size() == 2);

  const SolveOutcome out = block_omp(ins.red, ins.blocks, SolveConfig{});
  CHECK(out.converged);
  REQUIRE(out.selected_blocks.size() == 1);
  CHECK(out.selected_blocks[0] == 0);
}

TEST_CASE("noisy mode refuses a block that breaks the rank") {
  const std::vector<ChannelConfig> chans{{2, 2.0}, {4, 4.0}};
  SpectrumGrid x = test::grid_with(1.0, 8, false, {{1, {1.0, 0.5}}});
  const std::vector<int> support{1, 5};
  Instance ins = make_instance(chans, x, &support);
  // small inconsistency keeps the residual above zero after block one
  ins.red.rhs(0) += cdouble{1e-3, 0.0};

  SolveConfig cfg;
  cfg.noisy_mode = true;
  const SolveOutcome out = block_omp(ins.red, ins.blocks, cfg);
  CHECK(out.converged);
  CHECK(out.iterations == 1); // the duplicate block was refused
  CHECK(out.selected_blocks == std::vector<int>{0});
  CHECK(out.posedness == Posedness::well_posed);
}

TEST_CASE("greedy residuals never increase") {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> pos(0, 23);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int rep = 0; rep < 40; ++rep) {
    SpectrumGrid x = SpectrumGrid::zeros(1.0, 24, false);
    for (int i = 0; i < 6; ++i) x.at(pos(rng)) = cdouble{g(rng), g(rng)};
    const std::vector<ChannelConfig> chans{{4, 4.0}, {6, 6.0}};
    const Instance ins = make_instance(chans, x);
    if (ins.red.empty() || ins.blocks.empty()) continue;
    const SolveOutcome out = block_omp(ins.red, ins.blocks, SolveConfig{});
    for (std::size_t i = 1; i < out.residual_history.size(); ++i)
      CHECK(out.residual_history[i] <=
            out.residual_history[i - 1] * (1.0 + 1e-9));
  }
}

TEST_CASE("scaling the data scales the solution and nothing else") {
  std::mt19937_64 rng(19);
  SpectrumGrid x = SpectrumGrid::zeros(1.0, 24, false);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int k : {2, 3, 9, 10, 17}) x.at(k) = cdouble{g(rng), g(rng)};
  const std::vector<ChannelConfig> chans{{4, 4.0}, {6, 6.0}};
  Instance ins = make_instance(chans, x);
  REQUIRE_FALSE(ins.blocks.empty());

  SolveConfig cfg;
  const SolveOutcome base = block_omp(ins.red, ins.blocks, cfg);

  const double c = 3.7;
  Instance scaled = ins;
  scaled.red.rhs *= c;
  SolveConfig cfg2;
  cfg2.omp_threshold = cfg.omp_threshold * c * c;
  const SolveOutcome out = block_omp(scaled.red, scaled.blocks, cfg2);

  CHECK(out.selected_blocks == base.selected_blocks);
  for (Eigen::Index i = 0; i < out.solution.size(); ++i)
    CHECK(std::abs(out.solution(i) - c * base.solution(i)) <=
          1e-9 * std::max(1.0, std::abs(c * base.solution(i))));
}

TEST_CASE("identical inputs give identical outcomes") {
  std::mt19937_64 rng(23);
  const SpectrumGrid x = test::random_grid(1.0, 24, false, rng);
  const std::vector<ChannelConfig> chans{{4, 4.0}, {6, 6.0}};
  const Instance ins = make_instance(chans, x);
  const SolveOutcome a = block_omp(ins.red, ins.blocks, SolveConfig{});
  const SolveOutcome b = block_omp(ins.red, ins.blocks, SolveConfig{});
  CHECK(a.selected_blocks == b.selected_blocks);
  CHECK(a.iterations == b.iterations);
  CHECK(a.residual_norm == b.residual_norm);
  for (Eigen::Index i = 0; i < a.solution.size(); ++i)
    CHECK(a.solution(i) == b.solution(i));
}

TEST_CASE("orthogonal columns have condition number one") {
  const std::vector<ChannelConfig> chans{{6, 6.0}};
  const SpectrumGrid x = test::grid_with(
      1.0, 6, false, {{1, {1.0, 0.0}}, {3, {2.0, 0.0}}});
  const std::vector<int> support{1, 3};
  const Instance ins = make_instance(chans, x, &support);
  CHECK(condition_diagnostics(ins.red) == doctest::Approx(1.0));
}

TEST_CASE("greedy agreement with the exhaustive minimum-band search") {
  std::mt19937_64 rng(29);
  std::uniform_int_distribution<int> mpick(3, 9);
  std::uniform_int_distribution<int> width(1, 3);
  std::normal_distribution<double> g(0.0, 1.0);
  int tested = 0;
  for (int attempt = 0; attempt < 2000 && tested < 40; ++attempt) {
    const int p = 2 + (tested % 2);
    std::vector<ChannelConfig> chans;
    for (int i = 0; i < p; ++i) {
      int mi = mpick(rng);
      chans.push_back(ChannelConfig{mi, static_cast<double>(mi)});
    }
    const int m = 24;
    if (!check_unique_columns(chans, m).ok) continue;
    SpectrumGrid x = SpectrumGrid::zeros(1.0, m, false);
    const int nb = 1 + static_cast<int>(rng() % 2);
    std::uniform_int_distribution<int> pos(0, m - 4);
    for (int i = 0; i < nb; ++i) {
      const int s = pos(rng);
      const int w = width(rng);
      for (int j = 0; j < w && s + j < m; ++j)
        x.at(s + j) = cdouble{g(rng), g(rng)};
    }
    const Instance ins = make_instance(chans, x);
    if (ins.red.empty() || ins.blocks.empty() || ins.blocks.size() > 14)
      continue;

    const SolveConfig cfg;
    const SolveOutcome omp = block_omp(ins.red, ins.blocks, cfg);
    // success = threshold reached with a full-rank final matrix
    if (!omp.converged || omp.posedness != Posedness::well_posed) continue;
    const ref::ExhaustiveResult oracle = ref::min_band_exhaustive(
        ins.red, ins.blocks, cfg.omp_threshold, cfg.rank_tolerance);
    REQUIRE(oracle.found);
    // several minimal supports can explain the data exactly; agreement is
    // only defined when the minimizer is unique
    if (!oracle.unique_minimum) continue;

    // the oracle support is contained in the greedy selection
    for (int blk : oracle.blocks) {
      const bool present =
          std::find(omp.selected_blocks.begin(), omp.selected_blocks.end(),
                    blk) != omp.selected_blocks.end();
      CHECK(present);
    }
    // and the solutions agree
    double scale = 1.0;
    for (Eigen::Index i = 0; i < oracle.solution.size(); ++i)
      scale = std::max(scale, std::abs(oracle.solution(i)));
    for (Eigen::Index i = 0; i < oracle.solution.size(); ++i)
      CHECK(std::abs(omp.solution(i) - oracle.solution(i)) <= 1e-8 * scale);
    ++tested;
  }
  CHECK(tested >= 25);
}
