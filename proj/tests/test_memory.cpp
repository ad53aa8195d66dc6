#include <gtest/gtest.h>

#include <atomic>
#include <set>
#include <thread>

#include "sdrqc/bench.hpp"
#include "sdrqc/errors.hpp"
#include "sdrqc/memory.hpp"
#include "sdrqc/oracle.hpp"
#include "support/oracles.hpp"

using namespace sdrqc;

namespace {

ModelParams small_params(std::uint64_t seed = 1) {
  ModelParams p;
  p.geometry = {6, 3, 12, 12};
  p.seed = seed;
  return p;
}

ModelParams wide_params(std::uint64_t seed = 1) {
  ModelParams p;
  p.geometry = {16, 8, 256, 256};
  p.seed = seed;
  return p;
}

// Wider input so that dozens of 32-bit patterns leave the binary F weights sparse.
ModelParams sparse_params(std::uint64_t seed = 1) {
  ModelParams p = wide_params(seed);
  p.geometry.n_in = p.geometry.n_out = 512;
  return p;
}

BitPattern bits(std::uint32_t width, std::vector<std::uint32_t> on) { return BitPattern::from_indices(width, on); }

// Disjoint patterns of `active` bits each: pattern i uses bits [i*active, (i+1)*active).
std::vector<BitPattern> disjoint_patterns(std::uint32_t width, std::uint32_t active, std::uint32_t count) {
  std::vector<BitPattern> out;
  for (std::uint32_t i = 0; i < count; ++i) {
    std::vector<std::uint32_t> on;
    for (std::uint32_t b = 0; b < active; ++b) on.push_back(i * active + b);
    out.push_back(bits(width, on));
  }
  return out;
}

}  // namespace

TEST(ModelParams, Validation) {
  auto p = small_params();
  EXPECT_NO_THROW(p.validate());
  p.tau_min = 0.0;
  EXPECT_THROW(p.validate(), GeometryError);
  p = small_params();
  p.tau_max = p.tau_min;
  EXPECT_THROW(p.validate(), GeometryError);
  p = small_params();
  p.geometry.q = 0;
  EXPECT_THROW(SdrMemory{p}, GeometryError);
}

TEST(NewModel, Dimensions) {
  SdrMemory m(small_params());
  EXPECT_EQ(m.f().rows(), 12u);
  EXPECT_EQ(m.f().cols(), 18u);
  EXPECT_EQ(m.f().size(), 12u * 18u);
  EXPECT_EQ(m.h().size(), 18u * 18u);
  EXPECT_EQ(m.d().rows(), 18u);
  EXPECT_EQ(m.d().cols(), 12u);
  EXPECT_EQ(m.f().count_ones() + m.h().count_ones() + m.d().count_ones(), 0u);
  EXPECT_FALSE(m.active().has_value());
  EXPECT_EQ(m.counters().weight_reads, 0u);
}

TEST(NewModel, ZeroFamiliarityForAnyInput) {
  SdrMemory m(small_params());
  Rng rng(5);
  for (int i = 0; i < 20; ++i) {
    const auto act = m.summate(random_pattern(12, 1 + i % 12, rng));
    EXPECT_EQ(act.familiarity, 0.0);
    for (auto u : act.raw) EXPECT_EQ(u, 0u);
  }
}

TEST(NewModel, SameSeedSameBehavior) {
  SdrMemory a(small_params(77));
  SdrMemory b(small_params(77));
  Rng rng(1);
  for (int i = 0; i < 30; ++i) {
    const auto p = random_pattern(12, 4, rng);
    EXPECT_EQ(a.store(p, p).code, b.store(p, p).code);
    EXPECT_EQ(a.query(p).code, b.query(p).code);
  }
  EXPECT_EQ(a.f(), b.f());
  EXPECT_EQ(a.h(), b.h());
  EXPECT_EQ(a.d(), b.d());
  EXPECT_TRUE(same_counters(a.counters(), b.counters()));
}

TEST(Summate, CountsEveryWeightRead) {
  SdrMemory m(small_params());
  (void)m.summate(bits(12, {0, 1}));
  EXPECT_EQ(m.counters().weight_reads, 12u * 18u);
  m.activate(Code({0, 1, 2, 0, 1, 2}, 3));
  m.reset_counters();
  (void)m.summate(bits(12, {0, 1}), true);
  EXPECT_EQ(m.counters().weight_reads, 12u * 18u + 18u * 6u);
}

TEST(Summate, WidthMismatch) {
  SdrMemory m(small_params());
  EXPECT_THROW((void)m.summate(BitPattern(11)), WidthMismatch);
  EXPECT_THROW((void)m.store(BitPattern(13)), WidthMismatch);
  EXPECT_THROW((void)m.query(BitPattern(1)), WidthMismatch);
  EXPECT_THROW((void)m.store(BitPattern(12), BitPattern(5)), WidthMismatch);
}

TEST(Summate, StoredPatternIsFullyFamiliar) {
  SdrMemory m(small_params());
  const auto x = bits(12, {0, 3, 5, 9});
  const Code code = m.store(x).code;
  const auto act = m.summate(x);
  for (std::uint32_t c = 0; c < 6; ++c) {
    for (std::uint32_t w = 0; w < 3; ++w) {
      const double expected = w == code.winner(c) ? 1.0 : 0.0;
      EXPECT_EQ(act.normalized(c * 3 + w), expected);
    }
    EXPECT_EQ(act.cluster_familiarity(c), 1.0);
  }
  EXPECT_EQ(act.familiarity, 1.0);
}

TEST(Summate, HalfOverlapGivesHalfFamiliarity) {
  // x has 4 active bits, y shares 2 of them: each of x's winners receives 2 of
  // y's 4 active bits -> normalized 0.5, every other unit 0 -> G = 0.5.
  SdrMemory m(small_params());
  const auto x = bits(12, {0, 1, 2, 3});
  (void)m.store(x);
  const auto y = bits(12, {0, 1, 8, 9});
  const auto act = m.summate(y);
  EXPECT_EQ(act.divisor, 4u);
  EXPECT_EQ(act.familiarity, 0.5);
}

TEST(Summate, EmptyInputIsLegal) {
  SdrMemory m(small_params());
  (void)m.store(bits(12, {0, 1, 2}));
  const auto act = m.summate(BitPattern(12));
  EXPECT_EQ(act.divisor, 1u);
  EXPECT_EQ(act.familiarity, 0.0);
  EXPECT_NO_THROW((void)m.select_code(act, SelectMode::stochastic));
}

TEST(SelectCode, ArgmaxReturnsStoredCode) {
  SdrMemory m(small_params());
  const auto x = bits(12, {2, 4, 6, 8});
  const Code code = m.store(x).code;
  EXPECT_EQ(m.select_code(m.summate(x), SelectMode::argmax), code);
}

TEST(SelectCode, ZeroFamiliarityIsUniform) {
  auto p = small_params(11);
  p.tau_max = 100.0;
  SdrMemory m(p);
  const auto act = m.summate(bits(12, {1, 2, 3}));
  ASSERT_EQ(act.familiarity, 0.0);
  std::vector<std::vector<std::uint64_t>> counts(6, std::vector<std::uint64_t>(3, 0));
  for (int t = 0; t < 100000; ++t) {
    const Code c = m.select_code(act, SelectMode::stochastic);
    for (std::uint32_t cl = 0; cl < 6; ++cl) ++counts[cl][c.winner(cl)];
  }
  for (const auto& cluster : counts) {
    EXPECT_LT(sdrqc::testing::chi_square_uniform(cluster), sdrqc::testing::kChi2Crit999Df2);
  }
}

TEST(SelectCode, FullFamiliarityFollowsArgmax) {
  auto p = small_params(12);
  p.tau_min = 0.05;
  SdrMemory m(p);
  const auto x = bits(12, {0, 5, 7, 11});
  const Code code = m.store(x).code;
  const auto act = m.summate(x);
  ASSERT_EQ(act.familiarity, 1.0);
  int agree = 0;
  for (int t = 0; t < 10000; ++t) agree += m.select_code(act, SelectMode::stochastic) == code ? 1 : 0;
  EXPECT_GE(agree, 9900);
}

TEST(SelectCode, CostIsFixed) {
  SdrMemory m(small_params());
  const auto act = m.summate(bits(12, {0, 1}));
  m.reset_counters();
  (void)m.select_code(act, SelectMode::argmax);
  EXPECT_EQ(m.counters().rng_draws, 6u);
  EXPECT_EQ(m.counters().comparisons, 18u);
  m.reset_counters();
  (void)m.select_code(act, SelectMode::stochastic);
  EXPECT_EQ(m.counters().rng_draws, 6u);
  EXPECT_EQ(m.counters().comparisons, 18u);
}

TEST(Store, RepeatIsIdempotent) {
  SdrMemory m(small_params());
  const auto x = bits(12, {1, 4, 7, 10});
  const Code first = m.store(x).code;
  m.clear_active();
  m.reset_counters();
  const StoreResult second = m.store(x);
  EXPECT_EQ(second.code, first);
  EXPECT_EQ(second.familiarity, 1.0);
  EXPECT_EQ(m.counters().weights_set, 0u);
}

TEST(Store, WritesWinnersTimesActiveBits) {
  SdrMemory m(small_params());
  (void)m.store(bits(12, {0, 1, 2, 3}));
  EXPECT_EQ(m.counters().weight_writes, 24u);
  EXPECT_EQ(m.counters().weights_set, 24u);
  EXPECT_EQ(m.f().count_ones(), 24u);
  EXPECT_EQ(m.h().count_ones(), 0u);
}

TEST(Store, LinksFromPreviousActiveCode) {
  SdrMemory m(small_params());
  const Code a = m.store(bits(12, {0, 1, 2})).code;
  m.reset_counters();
  const Code b = m.store(bits(12, {6, 7, 8})).code;
  EXPECT_EQ(m.counters().weight_writes, 3u * 6u + 36u);
  for (std::uint32_t i = 0; i < 6; ++i) {
    for (std::uint32_t j = 0; j < 6; ++j) EXPECT_TRUE(m.h().get(a.unit(i), b.unit(j)));
  }
}

TEST(Store, CostIndependentOfStoredCount) {
  auto p = small_params(3);
  p.geometry.n_in = 64;
  SdrMemory m(p);
  Rng rng(9);
  const auto patterns = random_patterns(64, 8, 5000, rng);
  CostReport tenth;
  CostReport last;
  for (std::size_t i = 0; i < patterns.size(); ++i) {
    m.clear_active();
    m.reset_counters();
    (void)m.store(patterns[i]);
    if (i == 9) tenth = m.counters();
    if (i == 4999) last = m.counters();
  }
  EXPECT_TRUE(same_counters(tenth, last));
  EXPECT_EQ(tenth.weight_reads, 64u * 18u);
  EXPECT_EQ(tenth.weight_writes, 8u * 6u);
}

TEST(Query, RecallsStoredItem) {
  SdrMemory m(small_params());
  const auto x = bits(12, {0, 2, 4, 6});
  const Code code = m.store(x, x).code;
  const QueryResult r = m.query(x);
  EXPECT_EQ(r.code, code);
  EXPECT_EQ(r.readout, x);
  EXPECT_EQ(r.familiarity, 1.0);
}

TEST(Query, UntrainedModel) {
  SdrMemory m(small_params());
  const QueryResult r = m.query(bits(12, {1, 2, 3}));
  EXPECT_EQ(r.familiarity, 0.0);
  EXPECT_EQ(r.readout.count(), 0u);
}

TEST(Query, TenPercentCorruption) {
  // Moving 1 of 10 active bits leaves each stored winner with 9/10.
  auto p = small_params(21);
  p.geometry.n_in = p.geometry.n_out = 40;
  SdrMemory m(p);
  Rng rng(4);
  const auto x = random_pattern(40, 10, rng);
  const Code code = m.store(x, x).code;
  const auto probe = corrupt(x, 1, rng);
  ASSERT_EQ(overlap(probe, x), 9u);
  const QueryResult r = m.query(probe);
  EXPECT_EQ(r.code, code);
  EXPECT_DOUBLE_EQ(r.familiarity, 0.9);
  EXPECT_EQ(r.readout, x);
}

TEST(Query, ReadOnlyVariantLeavesStateAlone) {
  SdrMemory m(small_params());
  const auto x = bits(12, {0, 2, 4, 6});
  (void)m.store(x);
  m.clear_active();
  const auto before = m.counters();
  Rng rng(1);
  CostReport cost;
  const QueryResult r = m.query(x, rng, cost);
  EXPECT_FALSE(m.active().has_value());
  EXPECT_EQ(m.counters().weight_reads, before.weight_reads);
  EXPECT_EQ(cost.weight_reads, 12u * 18u + 6u * 12u);
  EXPECT_EQ(r.familiarity, 1.0);
}

TEST(Step, ReplaysSingleTransition) {
  SdrMemory m(small_params());
  const auto x1 = bits(12, {0, 1, 2, 3});
  const auto x2 = bits(12, {6, 7, 8, 9});
  const std::vector<BitPattern> seq{x1, x2};
  const auto codes = m.learn_sequence(seq, seq);
  (void)m.query(x1);
  const StepResult s = m.step();
  EXPECT_EQ(s.code, codes[1]);
  EXPECT_EQ(s.readout, x2);
  EXPECT_EQ(s.familiarity, 1.0);
}

TEST(Step, FreshModelFallsToTieBreaks) {
  SdrMemory m(small_params());
  m.activate(Code({0, 1, 2, 0, 1, 2}, 3));
  m.reset_counters();
  const StepResult s = m.step();
  EXPECT_EQ(s.familiarity, 0.0);
  EXPECT_EQ(m.counters().rng_draws, 6u);
  EXPECT_EQ(m.counters().weight_reads, 18u * 6u + 6u * 12u);
}

TEST(Step, NeedsActiveCode) {
  SdrMemory m(small_params());
  EXPECT_THROW((void)m.step(), NoActiveState);
  EXPECT_THROW((void)m.collapse(), NoActiveState);
}

TEST(Step, BranchingTiesSplitEvenly) {
  // A->B and A->C learned once each; pick the first seed whose B and C codes
  // are disjoint so every cluster holds a two-way tie.
  auto p = small_params();
  p.geometry.n_in = p.geometry.n_out = 30;
  const auto pats = disjoint_patterns(30, 4, 3);
  std::optional<SdrMemory> chosen;
  Code code_a, code_b, code_c;
  for (std::uint64_t seed = 1; seed < 500 && !chosen; ++seed) {
    p.seed = seed;
    SdrMemory m(p);
    const std::vector<BitPattern> ab{pats[0], pats[1]};
    const std::vector<BitPattern> ac{pats[0], pats[2]};
    const auto c1 = m.learn_sequence(ab, ab);
    const auto c2 = m.learn_sequence(ac, ac);
    if (c1[0] == c2[0] && intersection(c1[1], c2[1]) == 0) {
      code_a = c1[0];
      code_b = c1[1];
      code_c = c2[1];
      chosen.emplace(std::move(m));
    }
  }
  ASSERT_TRUE(chosen.has_value());
  std::uint64_t to_b = 0;
  std::uint64_t total = 0;
  for (int run = 0; run < 1000; ++run) {
    chosen->activate(code_a);
    const StepResult s = chosen->step();
    for (std::uint32_t c = 0; c < 6; ++c) {
      ASSERT_TRUE(s.code.winner(c) == code_b.winner(c) || s.code.winner(c) == code_c.winner(c));
      to_b += s.code.winner(c) == code_b.winner(c) ? 1 : 0;
      ++total;
    }
  }
  EXPECT_NEAR(static_cast<double>(to_b) / static_cast<double>(total), 0.5, 0.05);
}

TEST(LearnSequence, SingleItemMatchesStore) {
  SdrMemory a(small_params(8));
  SdrMemory b(small_params(8));
  const auto x = bits(12, {3, 4, 5});
  const std::vector<BitPattern> one{x};
  const auto codes = a.learn_sequence(one);
  EXPECT_EQ(codes.front(), b.store(x).code);
  EXPECT_EQ(a.f(), b.f());
  EXPECT_EQ(a.h().count_ones(), 0u);
}

TEST(LearnSequence, ReplaysTenDisjointItems) {
  const auto seq = disjoint_patterns(256, 20, 10);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    SdrMemory m(wide_params(seed));
    const auto codes = m.learn_sequence(seq, seq);
    (void)m.query(seq[0]);
    for (std::size_t t = 1; t < seq.size(); ++t) {
      const StepResult s = m.step();
      EXPECT_EQ(s.code, codes[t]) << "seed " << seed << " step " << t;
      EXPECT_EQ(s.readout, seq[t]) << "seed " << seed << " step " << t;
    }
  }
}

TEST(LearnSequence, RelearningAndReplayWriteNothingNew) {
  SdrMemory m(wide_params(2));
  const auto seq = disjoint_patterns(256, 20, 6);
  const auto first = m.learn_sequence(seq, seq);
  m.reset_counters();
  const auto second = m.learn_sequence(seq, seq);
  EXPECT_EQ(first, second);
  EXPECT_EQ(m.counters().weights_set, 0u);

  m.reset_counters();
  (void)m.query(seq[0]);
  for (std::size_t t = 1; t < seq.size(); ++t) (void)m.step();
  EXPECT_EQ(m.counters().weight_writes, 0u);
  EXPECT_EQ(m.counters().weights_set, 0u);
}

TEST(LearnSequence, Errors) {
  SdrMemory m(small_params());
  EXPECT_THROW((void)m.learn_sequence(std::vector<BitPattern>{}), Error);
  const std::vector<BitPattern> bad{BitPattern(12), BitPattern(11)};
  EXPECT_THROW((void)m.learn_sequence(bad), WidthMismatch);
}

TEST(Superposition, FreshModelActivationIsZero) {
  SdrMemory m(small_params());
  const auto& act = m.current_superposition_inputs();
  EXPECT_EQ(act.raw.size(), 18u);
  for (auto u : act.raw) EXPECT_EQ(u, 0u);
  EXPECT_EQ(act.familiarity, 0.0);
}

TEST(Superposition, CollapseEqualsQueryCode) {
  SdrMemory m(small_params());
  const auto x = bits(12, {0, 1, 2});
  (void)m.store(x);
  const QueryResult r = m.query(x);
  EXPECT_EQ(m.collapse(), r.code);
}

TEST(Superposition, ImpliedLikelihoodMatchesRegistry) {
  SdrMemory m(sparse_params(17));
  Registry registry;
  Rng rng(23);
  const auto patterns = random_patterns(512, 32, 50, rng);
  for (std::size_t i = 0; i < patterns.size(); ++i) {
    m.clear_active();
    registry.add("x" + std::to_string(i), patterns[i], m.store(patterns[i]).code);
  }
  for (const auto& probe : registry.entries()) {
    (void)m.query(probe.input);
    const auto& act = m.current_superposition_inputs();
    // Implied strengths are well defined when every cluster has a unique max.
    for (std::uint32_t c = 0; c < 16; ++c) {
      std::uint32_t at_max = 0;
      for (std::uint32_t w = 0; w < 8; ++w) at_max += act.raw[c * 8 + w] == act.cluster_max[c] ? 1 : 0;
      ASSERT_EQ(at_max, 1u);
    }
    const auto explicit_super = superposition_from_code(registry, m.collapse());
    for (std::size_t i = 0; i < registry.size(); ++i) {
      const auto& y = registry.entries()[i];
      EXPECT_EQ(implied_likelihood(act, y.code), likelihood(y.code, m.collapse()));
      EXPECT_EQ(explicit_super.levels[i], likelihood(y.code, m.collapse()));
    }
    // Duality: the strongest stored code is the collapsed one.
    EXPECT_EQ(m.collapse(), probe.code);
  }
}

// ---------------------------------------------------------------------------
// Properties over generated workloads
// ---------------------------------------------------------------------------

TEST(Properties, WeightsNeverDecrease) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto p = small_params(seed);
    p.geometry.n_in = p.geometry.n_out = 24;
    SdrMemory m(p);
    Rng rng(seed * 101);
    BitMatrix f = m.f(), h = m.h(), d = m.d();
    auto check = [](const BitMatrix& before, const BitMatrix& after) {
      for (std::size_t i = 0; i < before.size(); ++i) {
        if (before.cell(i)) ASSERT_TRUE(after.cell(i));
      }
    };
    for (int op = 0; op < 200; ++op) {
      const auto x = random_pattern(24, 1 + static_cast<std::uint32_t>(rng.below(8)), rng);
      switch (rng.below(5)) {
        case 0: (void)m.store(x, x); break;
        case 1: (void)m.query(x); break;
        case 2: if (m.active()) (void)m.step(SelectMode::stochastic); break;
        case 3: (void)m.learn_sequence(std::vector<BitPattern>{x, random_pattern(24, 3, rng)}); break;
        default: m.clear_active(); break;
      }
      check(f, m.f());
      check(h, m.h());
      check(d, m.d());
      f = m.f();
      h = m.h();
      d = m.d();
    }
  }
}

TEST(Properties, DeterministicCallSequences) {
  auto run = [](std::uint64_t seed) {
    SdrMemory m(wide_params(seed));
    Rng rng(seed);
    std::vector<std::string> trace;
    for (int i = 0; i < 40; ++i) {
      const auto x = random_pattern(256, 32, rng);
      trace.push_back(m.store(x, x).code.to_string());
      const auto r = m.query(corrupt(x, 3, rng));
      trace.push_back(r.code.to_string() + r.readout.to_string());
      if (i % 5 == 0) trace.push_back(m.step(SelectMode::stochastic).code.to_string());
    }
    const auto c = m.counters();
    trace.push_back(std::to_string(c.weight_reads) + "/" + std::to_string(c.weight_writes) + "/" +
                    std::to_string(c.weights_set) + "/" + std::to_string(c.comparisons) + "/" +
                    std::to_string(c.rng_draws));
    return trace;
  };
  EXPECT_EQ(run(5), run(5));
  EXPECT_NE(run(5), run(6));
}

TEST(Properties, ExactMatchRecall) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    SdrMemory m(sparse_params(seed));
    Rng rng(seed + 1000);
    const auto patterns = random_patterns(512, 32, 60, rng);
    std::vector<Code> codes;
    for (const auto& x : patterns) {
      m.clear_active();
      codes.push_back(m.store(x).code);
    }
    std::set<std::string> distinct;
    for (const auto& c : codes) distinct.insert(c.to_string());
    ASSERT_EQ(distinct.size(), codes.size());
    for (std::size_t i = 0; i < patterns.size(); ++i) EXPECT_EQ(m.query(patterns[i]).code, codes[i]);
  }
}

TEST(Properties, FixedCostQueryAcrossGrowth) {
  SdrMemory m(wide_params(4));
  Rng rng(8);
  const auto patterns = random_patterns(256, 32, 2001, rng);
  const BitPattern& probe = patterns.back();
  std::optional<CostReport> reference;
  for (std::size_t i = 0; i < 2000; ++i) {
    m.clear_active();
    (void)m.store(patterns[i]);
    if (i == 0 || i == 9 || i == 99 || i == 999 || i == 1999) {
      m.reset_counters();
      (void)m.query(probe);
      const auto act = m.summate(probe);
      (void)m.select_code(act, SelectMode::stochastic);
      if (!reference) reference = m.counters();
      EXPECT_TRUE(same_counters(*reference, m.counters())) << "after " << i + 1 << " stored";
    }
  }
}

TEST(Properties, SimilarInputsGetSimilarCodes) {
  // Pooled over 20 seeds: input overlap level vs code intersection with the base.
  const std::vector<double> levels{1.0, 0.8, 0.6, 0.4, 0.2, 0.0};
  std::vector<double> xs, ys;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    SdrMemory m(wide_params(seed));
    Rng rng(seed * 7);
    const auto base = random_pattern(256, 20, rng);
    const Code base_code = m.store(base).code;
    for (double level : levels) {
      const auto probe = perturb(base, static_cast<std::uint32_t>(level * 20 + 0.5), rng);
      const Code c = m.select_code(m.summate(probe), SelectMode::stochastic);
      xs.push_back(level);
      ys.push_back(intersection(c, base_code));
    }
  }
  EXPECT_GE(spearman(xs, ys), 0.8);
}

TEST(SharedMemory, ConcurrentReadersWithWriter) {
  SdrMemory base(sparse_params(6));
  Rng rng(6);
  const auto patterns = random_patterns(512, 32, 40, rng);
  for (std::size_t i = 0; i < 20; ++i) {
    base.clear_active();
    (void)base.store(patterns[i]);
  }
  std::vector<Code> expected;
  for (std::size_t i = 0; i < 20; ++i) expected.push_back(base.query(patterns[i]).code);

  SharedMemory shared(std::move(base));
  std::atomic<int> mismatches{0};
  std::vector<std::thread> readers;
  for (int t = 0; t < 4; ++t) {
    readers.emplace_back([&, t] {
      Rng local(100 + t);
      for (int rep = 0; rep < 50; ++rep) {
        for (std::size_t i = 0; i < 20; ++i) {
          CostReport cost;
          if (shared.query(patterns[i], local, cost).code != expected[i]) ++mismatches;
        }
      }
    });
  }
  std::thread writer([&] {
    for (std::size_t i = 20; i < 40; ++i) {
      shared.write([&](SdrMemory& m) {
        m.clear_active();
        return m.store(patterns[i]);
      });
    }
  });
  for (auto& r : readers) r.join();
  writer.join();
  EXPECT_EQ(mismatches.load(), 0);
  EXPECT_EQ(shared.read([](const SdrMemory& m) { return m.f().count_ones() > 0; }), true);
}
