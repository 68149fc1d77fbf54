#include <random>

#include "doctest.h"
#include "pasm/audits.hpp"
#include "pasm/eval.hpp"
#include "pasm/policies.hpp"
#include "support/builders.hpp"
#include "support/scripted.hpp"

using namespace pasm;
using namespace pasm::testing;

namespace {

std::string flat(const AuditResult& r) {
  std::string s;
  for (const auto& f : r.failures) {
    s += f;
    s += "; ";
  }
  return s;
}

}  // namespace

TEST_CASE("top-k sets rank marginals with ties toward low ids") {
  auto three = three_item_coverage();
  MarginalEngine eng(*three, MarginalMode::exact());
  CHECK(top_k_set(eng, {}, {}, 1) == ItemSet::of({2}));
  CHECK(top_k_set(eng, {}, {}, 2) == ItemSet::of({0, 2}));
  CHECK(top_k_set(eng, {}, {}, 3) == ItemSet::of({0, 1, 2}));
  // selected items never reappear; with item 2 in hand, item 0's element
  // is already covered in state 1, so its marginal drops to 1 while
  // item 1 keeps a marginal of 2
  CHECK(top_k_set(eng, ItemSet::of({2}), {}, 1) == ItemSet::of({1}));

  // with enough dummies around, negative marginals are displaced
  auto neg = negative_modular_pair();
  Instance exec = neg->with_dummy_items(3);
  MarginalEngine neng(exec, MarginalMode::exact());
  ItemSet m = top_k_set(neng, {}, {}, 2);
  CHECK(m == ItemSet::of({2, 3}));
  CHECK(marginal_sum(neng, m, {}, {}) == 0.0);

  // ask for more than exists: everything comes back
  auto coin = two_coin_coverage();
  MarginalEngine ceng(*coin, MarginalMode::exact());
  CHECK(top_k_set(ceng, {}, {}, 5) == ItemSet::of({0, 1}));
}

TEST_CASE("mixture weights follow the closed form") {
  MixtureWeights w1 = mixture_weights(1.0);
  CHECK(w1.singleton == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(w1.density == doctest::Approx(0.8).epsilon(1e-12));

  MixtureWeights wh = mixture_weights(0.5);
  CHECK(wh.singleton == doctest::Approx(2.0 / 7.0).epsilon(1e-12));
  CHECK(wh.density == doctest::Approx(5.0 / 7.0).epsilon(1e-12));
  CHECK(wh.singleton + wh.density == doctest::Approx(1.0).epsilon(1e-12));

  CHECK_THROWS_AS(mixture_weights(0.0), ConfigError);
  CHECK_THROWS_AS(mixture_weights(-0.5), ConfigError);
  CHECK_THROWS_AS(mixture_weights(1.5), ConfigError);
}

TEST_CASE("batch budgets follow the closed form") {
  BatchBudget b = batch_budget_T(16, 16.0, 1.0, 0.0);
  CHECK_FALSE(b.degenerate);
  CHECK(b.delta == doctest::Approx(0.25).epsilon(1e-9));
  CHECK(b.batches == 24);  // ceil(log2(64)) * ceil(log2(16))

  BatchBudget s = batch_budget_T(5, 4.0, 1.0, 0.0);
  CHECK(s.delta == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(s.batches == 8);  // ceil(log2(10)) * ceil(log2(4))

  // budget equal to the cheapest cost at alpha 0: the form degenerates
  BatchBudget d = batch_budget_T(4, 1.0, 1.0, 0.0);
  CHECK(d.degenerate);
  CHECK(d.batches == 0);

  BatchBudget mid = batch_budget_T(4, 8.0, 1.0, 0.5);
  CHECK_FALSE(mid.degenerate);
  CHECK(mid.batches > 0);
  CHECK(mid.delta > 0.0);
  CHECK(mid.delta < 1.0);

  CHECK_THROWS_AS(batch_budget_T(4, 8.0, 1.0, 1.0), ConfigError);
  CHECK_THROWS_AS(batch_budget_T(4, 8.0, 1.0, -0.1), ConfigError);
  CHECK_THROWS_AS(batch_budget_T(4, 0.5, 1.0, 0.0), ConfigError);
  CHECK_THROWS_AS(batch_budget_T(0, 8.0, 1.0, 0.0), ConfigError);
}

TEST_CASE("policy constructors validate their arguments") {
  auto three = three_item_coverage();
  CHECK_THROWS_AS(PartialAdaptiveGreedy(three, -0.1, 2), ConfigError);
  CHECK_THROWS_AS(PartialAdaptiveGreedy(three, 1.1, 2), ConfigError);
  CHECK_THROWS_AS(PartialAdaptiveGreedy(three, 0.5, 0), ConfigError);
  CHECK_THROWS_AS(PartialAdaptiveGreedy(three, 0.5, 4), ConfigError);

  PartialAdaptiveGreedy ok(three, 0.5, 2);
  CHECK(ok.cardinality() == 2);
  CHECK(ok.alpha() == 0.5);
  CHECK(ok.name() == "pa-greedy");
  // the execution instance carries 2k - 1 extra dummy items
  CHECK(ok.instance().num_items() == 6);
  CHECK(ok.instance().num_real_items() == 3);

  auto knap = disjoint_knapsack();
  CHECK_THROWS_AS(DensityGreedy(knap, 1.5, 2.0), ConfigError);
  CHECK_THROWS_AS(DensityGreedy(knap, 0.5, 0.5), ConfigError);

  TabularParams tab;
  tab.table[{{}, {0}}] = 0.0;
  tab.table[{{0}, {0}}] = 1.0;
  auto free_item = std::make_shared<const Instance>(
      "free", StateSpace{{1}}, CostFunction{{0.0}}, Prior::independent({{1.0}}),
      UtilityFunction(std::move(tab)), 1);
  CHECK_THROWS_AS(DensityGreedy(free_item, 0.5, 1.0), ConfigError);

  CHECK_THROWS_AS(MixedKnapsackPolicy(knap, 0.0, 2.0), ConfigError);
}

TEST_CASE("cardinality greedy keeps one batch when alpha is zero") {
  auto three = three_item_coverage();
  PartialAdaptiveGreedy pol(three, 0.0, 2);
  ScriptedContext ctx(Realization({0, 0, 0}), {0, 0});
  RunTrace tr = pol.run(ctx);

  CHECK(tr.batch_count == 1);
  REQUIRE(tr.batches.size() == 1);
  CHECK(tr.batches[0].items == std::vector<ItemId>{0, 1});
  CHECK(tr.batches[0].observed.empty());  // never closed, never revealed
  CHECK(tr.selection_order == std::vector<ItemId>{0, 1});
  CHECK(tr.reason == TerminationReason::CardinalityReached);
  REQUIRE(tr.iterations.size() == 2);
  CHECK(tr.iterations[0].stayed);
  CHECK(tr.iterations[1].stayed);
  CHECK(tr.iterations[0].decision_rhs == 0.0);
  CHECK(tr.iterations[1].batch == 1);

  AuditResult audit = audit_cardinality_trace(pol.instance(), 0.0, 2, tr);
  INFO(flat(audit));
  CHECK(audit.ok);
}

TEST_CASE("cardinality greedy reveals and re-ranks when the trigger fails") {
  auto three = three_item_coverage();
  PartialAdaptiveGreedy pol(three, 1.0, 2);
  // always take the first offered candidate; item 0 turns out useful
  ScriptedContext ctx(Realization({1, 0, 0}), {0, 0});
  RunTrace tr = pol.run(ctx);

  // step 1: top-2 at the root is {0, 2} with mass 2 + 3; the fresh side
  // is identical, so the run stays and picks item 0
  REQUIRE(tr.iterations.size() == 2);
  CHECK(tr.iterations[0].t == 1);
  CHECK(tr.iterations[0].batch == 1);
  CHECK(tr.iterations[0].chosen == 0);
  CHECK(tr.iterations[0].stayed);
  CHECK(tr.iterations[0].decision_lhs == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(tr.iterations[0].decision_rhs == doctest::Approx(5.0).epsilon(1e-12));

  // step 2: the stale top-2 {1, 2} is worth 4 against the fresh bar 5,
  // so the batch closes, item 0 is revealed as state 1, and the refreshed
  // ranking picks item 1
  CHECK(tr.iterations[1].t == 2);
  CHECK(tr.iterations[1].batch == 2);
  CHECK(tr.iterations[1].chosen == 1);
  CHECK_FALSE(tr.iterations[1].stayed);
  CHECK(tr.iterations[1].decision_lhs == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(tr.iterations[1].decision_rhs == doctest::Approx(5.0).epsilon(1e-12));

  REQUIRE(tr.batches.size() == 2);
  CHECK(tr.batches[0].items == std::vector<ItemId>{0});
  REQUIRE(tr.batches[0].observed.size() == 1);
  CHECK(tr.batches[0].observed[0] == Observation{0, 1});
  CHECK(tr.batches[1].items == std::vector<ItemId>{1});
  CHECK(tr.batches[1].observed.empty());
  CHECK(tr.batch_count == 2);
  CHECK(tr.selected == ItemSet::of({0, 1}));
  CHECK(tr.reason == TerminationReason::CardinalityReached);

  AuditResult audit = audit_cardinality_trace(pol.instance(), 1.0, 2, tr);
  INFO(flat(audit));
  CHECK(audit.ok);
}

TEST_CASE("density greedy honors the opener bar and the budget") {
  auto knap = disjoint_knapsack();
  DensityGreedy pol(knap, 0.5, 2.0);
  // all three pool coins land heads; no reveal ever happens
  ScriptedContext ctx(Realization({1, 1, 1}), {0, 0, 0});
  RunTrace tr = pol.run(ctx);

  CHECK(tr.used_sampled_pool);
  CHECK(tr.sampled_pool == ItemSet::of({0, 1, 2}));
  // densities (1.5, 2, 1.5): item 1 opens at 2, item 0 clears the bar 1,
  // item 2 would clear it but no longer fits the budget
  CHECK(tr.selection_order == std::vector<ItemId>{1, 0});
  REQUIRE(tr.iterations.size() == 2);
  CHECK(tr.iterations[0].decision_lhs == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(tr.iterations[0].decision_rhs == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(tr.iterations[1].chosen == 0);  // density tie 1.5 vs 1.5, low id
  CHECK(tr.iterations[1].decision_lhs == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(tr.iterations[1].stayed);
  CHECK(tr.batch_count == 1);
  CHECK(tr.reason == TerminationReason::BudgetExhausted);

  AuditResult audit = audit_density_trace(*knap, 0.5, 2.0, tr);
  INFO(flat(audit));
  CHECK(audit.ok);
}

TEST_CASE("density greedy opens a second batch when density halves") {
  auto knap = disjoint_knapsack();
  DensityGreedy pol(knap, 1.0, 2.0);
  ScriptedContext ctx(Realization({0, 1, 0}), {0, 0, 0});
  RunTrace tr = pol.run(ctx);

  // item 1 opens at density 2; the runner-up density 1.5 misses the
  // alpha=1 bar, so batch 1 closes and item 0 reopens at 1.5
  CHECK(tr.selection_order == std::vector<ItemId>{1, 0});
  REQUIRE(tr.batches.size() == 2);
  CHECK(tr.batches[0].items == std::vector<ItemId>{1});
  REQUIRE(tr.batches[0].observed.size() == 1);
  CHECK(tr.batches[0].observed[0] == Observation{1, 1});
  CHECK(tr.batches[1].items == std::vector<ItemId>{0});
  REQUIRE(tr.iterations.size() == 2);
  CHECK_FALSE(tr.iterations[1].stayed);
  CHECK(tr.iterations[1].decision_lhs == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(tr.iterations[1].decision_rhs == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(tr.reason == TerminationReason::BudgetExhausted);

  AuditResult audit = audit_density_trace(*knap, 1.0, 2.0, tr);
  INFO(flat(audit));
  CHECK(audit.ok);
}

TEST_CASE("density greedy handles empty and singleton pools") {
  auto knap = disjoint_knapsack();
  DensityGreedy pol(knap, 0.5, 2.0);

  ScriptedContext none(Realization({0, 0, 0}), {1, 1, 1});
  RunTrace empty = pol.run(none);
  CHECK(empty.sampled_pool.empty());
  CHECK(empty.selected.empty());
  CHECK(empty.batch_count == 0);
  CHECK(empty.iterations.empty());
  CHECK(empty.reason == TerminationReason::GroundExhausted);
  CHECK(audit_density_trace(*knap, 0.5, 2.0, empty).ok);

  ScriptedContext one(Realization({0, 0, 0}), {1, 0, 1});
  RunTrace single = pol.run(one);
  CHECK(single.sampled_pool == ItemSet::of({1}));
  CHECK(single.selection_order == std::vector<ItemId>{1});
  CHECK(single.batch_count == 1);
  CHECK(single.reason == TerminationReason::GroundExhausted);
  CHECK(audit_density_trace(*knap, 0.5, 2.0, single).ok);
}

TEST_CASE("density greedy stops when no revealed density is positive") {
  auto pen = penalty_witness_pair();
  DensityGreedy pol(pen, 1.0, 2.0);
  ScriptedContext ctx(Realization({0, 1}), {0, 0});
  RunTrace tr = pol.run(ctx);

  // item 1 opens at density 0.5; item 0's density -0.5 misses the bar,
  // and stays negative after the reveal, so the run stops
  CHECK(tr.selection_order == std::vector<ItemId>{1});
  CHECK(tr.batch_count == 1);
  REQUIRE(tr.batches.size() == 1);
  REQUIRE(tr.batches[0].observed.size() == 1);
  CHECK(tr.batches[0].observed[0] == Observation{1, 1});
  CHECK(tr.iterations.size() == 1);
  CHECK(tr.reason == TerminationReason::NoPositiveDensity);

  AuditResult audit = audit_density_trace(*pen, 1.0, 2.0, tr);
  INFO(flat(audit));
  CHECK(audit.ok);
}

TEST_CASE("best singleton ranks expectations and respects budgets") {
  auto [e3, v3] = best_singleton(*three_item_coverage());
  CHECK(e3 == 2);
  CHECK(v3 == doctest::Approx(3.0).epsilon(1e-12));

  // exact tie between the two coins falls to the lower id
  auto [ec, vc] = best_singleton(*two_coin_coverage());
  CHECK(ec == 0);
  CHECK(vc == doctest::Approx(0.5).epsilon(1e-12));

  auto knap = disjoint_knapsack();
  CHECK(best_singleton(*knap, 2.0).first == 2);
  CHECK(best_singleton(*knap, 1.5).first == 1);  // item 2 no longer fits
  CHECK_THROWS_AS(best_singleton(*knap, 0.5), ConfigError);

  BestSingletonPolicy pol(knap, 2.0);
  CHECK(pol.chosen_item() == 2);
  CHECK(pol.name() == "best-singleton");
  ScriptedContext ctx(Realization({0, 0, 0}));
  RunTrace tr = pol.run(ctx);
  CHECK(tr.selection_order == std::vector<ItemId>{2});
  CHECK(tr.batch_count == 1);
  CHECK(tr.reason == TerminationReason::CardinalityReached);
  CHECK_FALSE(tr.used_sampled_pool);
}

TEST_CASE("fixed-set and concatenated policies assemble unions") {
  auto three = three_item_coverage();
  auto fixed = std::make_shared<FixedSetPolicy>(three, std::vector<ItemId>{2, 0});
  ScriptedContext ctx(Realization({0, 0, 0}));
  RunTrace tr = fixed->run(ctx);
  CHECK(tr.selection_order == std::vector<ItemId>{2, 0});
  CHECK(tr.batch_count == 1);
  CHECK(tr.reason == TerminationReason::GroundExhausted);
  CHECK_THROWS_AS(FixedSetPolicy(three, {7}), ConfigError);

  auto first = std::make_shared<FixedSetPolicy>(three, std::vector<ItemId>{0});
  auto second =
      std::make_shared<FixedSetPolicy>(three, std::vector<ItemId>{0, 1});
  PolicyPtr both = concatenate(first, second);
  CHECK(both->name() == "fixed-set@fixed-set");
  ScriptedContext cctx(Realization({0, 0, 0}));
  RunTrace joined = both->run(cctx);
  // the reselected item 0 adds nothing to the union
  CHECK(joined.selection_order == std::vector<ItemId>{0, 1});
  CHECK(joined.selected == ItemSet::of({0, 1}));
  CHECK(joined.batch_count == 2);

  auto other = std::make_shared<FixedSetPolicy>(two_coin_coverage(),
                                                std::vector<ItemId>{0});
  CHECK_THROWS_AS(concatenate(first, other), ConfigError);
}

TEST_CASE("level truncation stops selections, batch truncation stops reveals") {
  auto three = three_item_coverage();
  auto fixed =
      std::make_shared<FixedSetPolicy>(three, std::vector<ItemId>{0, 1, 2});

  PolicyPtr two = level_truncate(fixed, 2);
  CHECK(two->name() == "fixed-set[level<=2]");
  ScriptedContext ctx(Realization({0, 0, 0}));
  RunTrace tr = two->run(ctx);
  CHECK(tr.selection_order == std::vector<ItemId>{0, 1});
  CHECK(tr.reason == TerminationReason::CardinalityReached);

  ScriptedContext zctx(Realization({0, 0, 0}));
  RunTrace none = level_truncate(fixed, 0)->run(zctx);
  CHECK(none.selected.empty());
  CHECK(none.batch_count == 0);

  auto greedy = std::make_shared<PartialAdaptiveGreedy>(three, 1.0, 2);
  PolicyPtr capped = truncate_batches(greedy, 1);
  CHECK(capped->name() == "pa-greedy[batches<=1]");
  ScriptedContext moment(Realization({1, 0, 0}), {0});
  RunTrace halted = capped->run(moment);
  // the second step needs batch 2, which the cap refuses
  CHECK(halted.selection_order == std::vector<ItemId>{0});
  CHECK(halted.batch_count == 1);
  CHECK(halted.iterations.size() == 1);
  CHECK(halted.batches[0].observed.empty());
  CHECK(halted.reason == TerminationReason::TruncatedAtT);

  PolicyPtr loose = truncate_batches(greedy, 5);
  ScriptedContext free_ctx(Realization({1, 0, 0}), {0, 0});
  RunTrace full = loose->run(free_ctx);
  CHECK(full.selection_order == std::vector<ItemId>{0, 1});
  CHECK(full.batch_count == 2);
  CHECK(full.reason == TerminationReason::CardinalityReached);

  CHECK_THROWS_AS(truncate_batches(greedy, 0), ConfigError);
  CHECK_THROWS_AS(level_truncate(greedy, -1), ConfigError);
}

TEST_CASE("the knapsack mixture branches on its first coin") {
  auto knap = disjoint_knapsack();
  MixedKnapsackPolicy pol(knap, 0.5, 2.0);
  CHECK(pol.name() == "mixed-knapsack");
  CHECK(pol.weights().singleton == doctest::Approx(2.0 / 7.0).epsilon(1e-12));
  CHECK(pol.weights().density == doctest::Approx(5.0 / 7.0).epsilon(1e-12));

  ScriptedContext single_ctx(Realization({1, 1, 1}), {0});
  RunTrace single = pol.run(single_ctx);
  CHECK(single.selection_order == std::vector<ItemId>{2});
  CHECK_FALSE(single.used_sampled_pool);

  ScriptedContext dens_ctx(Realization({1, 1, 1}), {1, 0, 0, 0});
  RunTrace dens = pol.run(dens_ctx);
  CHECK(dens.used_sampled_pool);
  CHECK(dens.selection_order == std::vector<ItemId>{1, 0});
}

TEST_CASE("simulated runs are seed-deterministic and audit-clean") {
  auto three = three_item_coverage();
  for (double alpha : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    PartialAdaptiveGreedy pol(three, alpha, 2);
    std::mt19937_64 env(99);
    for (int rep = 0; rep < 10; ++rep) {
      Realization phi = sample_realization(pol.instance().prior(), {}, env);
      std::mt19937_64 r1(1000 + rep), r2(1000 + rep);
      RunTrace a = simulate_run(pol, phi, r1);
      RunTrace b = simulate_run(pol, phi, r2);
      CHECK(a.selection_order == b.selection_order);
      CHECK(a.batch_count == b.batch_count);
      CHECK(a.realized_utility ==
            pol.instance().utility_value(a.selected, phi));

      AuditResult audit = audit_cardinality_trace(pol.instance(), alpha, 2, a);
      INFO("alpha ", alpha, " rep ", rep, ": ", flat(audit));
      CHECK(audit.ok);
    }
  }

  auto knap = disjoint_knapsack();
  for (double alpha : {0.0, 0.5, 1.0}) {
    DensityGreedy pol(knap, alpha, 2.5);
    std::mt19937_64 env(7);
    for (int rep = 0; rep < 10; ++rep) {
      Realization phi = sample_realization(knap->prior(), {}, env);
      std::mt19937_64 r(500 + rep);
      RunTrace tr = simulate_run(pol, phi, r);
      CHECK(knap->total_cost(tr.selected) <= 2.5 + 1e-9);

      AuditResult audit = audit_density_trace(*knap, alpha, 2.5, tr);
      INFO("alpha ", alpha, " rep ", rep, ": ", flat(audit));
      CHECK(audit.ok);
    }
  }
}

TEST_CASE("audits reject tampered traces") {
  auto three = three_item_coverage();
  PartialAdaptiveGreedy pol(three, 1.0, 2);
  ScriptedContext ctx(Realization({1, 0, 0}), {0, 0});
  RunTrace good = pol.run(ctx);
  REQUIRE(audit_cardinality_trace(pol.instance(), 1.0, 2, good).ok);

  RunTrace wrong_lhs = good;
  wrong_lhs.iterations[0].decision_lhs += 0.5;
  CHECK_FALSE(audit_cardinality_trace(pol.instance(), 1.0, 2, wrong_lhs).ok);

  RunTrace missing = good;
  missing.iterations.pop_back();
  CHECK_FALSE(audit_cardinality_trace(pol.instance(), 1.0, 2, missing).ok);

  RunTrace flipped = good;
  flipped.iterations[1].stayed = true;  // contradicts the batch advance
  CHECK_FALSE(audit_cardinality_trace(pol.instance(), 1.0, 2, flipped).ok);

  RunTrace swapped = good;  // claim a dummy was picked instead of item 1
  swapped.batches[1].items = {5};
  swapped.selection_order = {0, 5};
  swapped.iterations[1].chosen = 5;
  swapped.selected = ItemSet::of({0, 5});
  CHECK_FALSE(audit_cardinality_trace(pol.instance(), 1.0, 2, swapped).ok);

  auto knap = disjoint_knapsack();
  DensityGreedy dpol(knap, 0.5, 2.0);
  ScriptedContext dctx(Realization({1, 1, 1}), {0, 0, 0});
  RunTrace dgood = dpol.run(dctx);
  REQUIRE(audit_density_trace(*knap, 0.5, 2.0, dgood).ok);

  RunTrace dbad = dgood;
  dbad.iterations[1].decision_lhs = 1.2;
  CHECK_FALSE(audit_density_trace(*knap, 0.5, 2.0, dbad).ok);

  RunTrace outside = dgood;  // selection outside the sampled pool
  outside.sampled_pool = ItemSet::of({1});
  CHECK_FALSE(audit_density_trace(*knap, 0.5, 2.0, outside).ok);
}
