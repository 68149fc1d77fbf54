#include "pasm/audits.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "pasm/policies.hpp"

namespace pasm {

namespace {

template <class... Args>
void fail(AuditResult& res, Args&&... parts) {
  std::ostringstream os;
  (os << ... << parts);
  res.ok = false;
  res.failures.push_back(os.str());
}

bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

/** Shared structural checks: batch indices, selection log, reveal log. */
bool check_structure(AuditResult& res, const RunTrace& tr) {
  ++res.checks;
  if (tr.batch_count != static_cast<int>(tr.batches.size())) {
    fail(res, "batch_count ", tr.batch_count, " does not match ",
         tr.batches.size(), " recorded batches");
    return false;
  }
  ++res.checks;
  if (tr.selection_order.size() != tr.iterations.size()) {
    fail(res, "selection_order has ", tr.selection_order.size(),
         " entries but ", tr.iterations.size(), " iterations were logged");
    return false;
  }
  std::vector<ItemId> flat;
  for (const BatchRecord& b : tr.batches)
    flat.insert(flat.end(), b.items.begin(), b.items.end());
  ++res.checks;
  if (flat != tr.selection_order) {
    fail(res, "batch item lists do not concatenate to the selection order");
    return false;
  }
  ItemSet as_set;
  for (ItemId e : tr.selection_order) as_set.add(e);
  ++res.checks;
  if (as_set.mask() != tr.selected.mask()) {
    fail(res, "selected set does not match the selection order");
    return false;
  }

  int prev_batch = 1;
  for (size_t i = 0; i < tr.iterations.size(); ++i) {
    const IterationRecord& rec = tr.iterations[i];
    ++res.checks;
    if (i == 0 && (rec.batch != 1 || !rec.stayed))
      fail(res, "first iteration must stay in batch 1");
    ++res.checks;
    if (rec.t != static_cast<int>(i) + 1)
      fail(res, "iteration ", i, " carries t=", rec.t);
    ++res.checks;
    if (rec.chosen != tr.selection_order[i])
      fail(res, "iteration t=", rec.t, " chose ", rec.chosen,
           " but the selection order says ", tr.selection_order[i]);
    ++res.checks;
    if (rec.batch < prev_batch || rec.batch > prev_batch + 1)
      fail(res, "iteration t=", rec.t, " jumps from batch ", prev_batch,
           " to ", rec.batch);
    ++res.checks;
    if (!rec.stayed && rec.batch != prev_batch + 1)
      fail(res, "iteration t=", rec.t,
           " claims a batch open but stays in batch ", rec.batch);
    ++res.checks;
    if (rec.stayed && i > 0 && rec.batch != prev_batch)
      fail(res, "iteration t=", rec.t,
           " claims to stay but switched to batch ", rec.batch);
    prev_batch = rec.batch;
  }

  for (size_t b = 0; b < tr.batches.size(); ++b) {
    const BatchRecord& br = tr.batches[b];
    bool closed = !br.observed.empty();
    ++res.checks;
    if (!closed && b + 1 < tr.batches.size()) {
      fail(res, "batch ", b + 1, " was followed by another batch but never "
           "revealed");
      continue;
    }
    if (!closed) continue;
    ++res.checks;
    if (br.observed.size() != br.items.size()) {
      fail(res, "batch ", b + 1, " revealed ", br.observed.size(),
           " states for ", br.items.size(), " items");
      continue;
    }
    for (size_t i = 0; i < br.items.size(); ++i) {
      ++res.checks;
      if (br.observed[i].item != br.items[i])
        fail(res, "batch ", b + 1, " revealed item ", br.observed[i].item,
             " in the slot of item ", br.items[i]);
    }
  }
  return res.ok;
}

/** Observations of batches 1..upto, as the policy would have seen them. */
PartialRealization psi_through(const RunTrace& tr, int upto) {
  PartialRealization psi;
  for (int b = 0; b < upto && b < static_cast<int>(tr.batches.size()); ++b)
    for (const Observation& o : tr.batches[static_cast<size_t>(b)].observed)
      psi.observe(o.item, o.state);
  return psi;
}

std::pair<ItemId, double> argmax_density(MarginalEngine& eng,
                                         const ItemSet& candidates,
                                         const ItemSet& base,
                                         const PartialRealization& psi) {
  ItemId best = -1;
  double best_density = -std::numeric_limits<double>::infinity();
  for (ItemId e : candidates.to_vector()) {
    double d = eng.marginal(e, base, psi) / eng.instance().cost(e);
    if (d > best_density) {
      best_density = d;
      best = e;
    }
  }
  return {best, best_density};
}

}  // namespace

AuditResult audit_cardinality_trace(const Instance& exec_inst, double alpha,
                                    int k, const RunTrace& trace, double tol) {
  AuditResult res;
  if (!check_structure(res, trace)) return res;

  ++res.checks;
  if (static_cast<int>(trace.iterations.size()) > k)
    fail(res, "run selected ", trace.iterations.size(), " items with k=", k);
  ++res.checks;
  if (trace.reason == TerminationReason::CardinalityReached &&
      static_cast<int>(trace.iterations.size()) != k)
    fail(res, "run claims the cardinality was reached after ",
         trace.iterations.size(), " of ", k, " selections");

  MarginalEngine eng(exec_inst, MarginalMode::exact());
  ItemSet sel;
  int open = 1;  // batch that was open when the iteration began
  for (const IterationRecord& rec : trace.iterations) {
    PartialRealization stale = psi_through(trace, open - 1);

    ItemSet m_stale = top_k_set(eng, sel, stale, k);
    double lhs = marginal_sum(eng, m_stale, sel, stale);
    ItemSet m_fresh = top_k_set(eng, stale.domain(), stale, k);
    double rhs = alpha * marginal_sum(eng, m_fresh, stale.domain(), stale);

    if (rec.stayed) {
      ++res.checks;
      if (!near(lhs, rec.decision_lhs, tol) ||
          !near(rhs, rec.decision_rhs, tol))
        fail(res, "t=", rec.t, ": logged comparison ", rec.decision_lhs,
             " vs ", rec.decision_rhs, " but replay gives ", lhs, " vs ", rhs);
      ++res.checks;
      if (lhs < rhs - tol)
        fail(res, "t=", rec.t, ": stayed in batch ", rec.batch,
             " although the top-k mass ", lhs, " fell below ", rhs);
      ++res.checks;
      if (!m_stale.contains(rec.chosen))
        fail(res, "t=", rec.t, ": item ", rec.chosen,
             " is outside the stale top-k set");
    } else {
      ++res.checks;
      if (!near(lhs, rec.decision_lhs, tol) ||
          !near(rhs, rec.decision_rhs, tol))
        fail(res, "t=", rec.t, ": logged comparison ", rec.decision_lhs,
             " vs ", rec.decision_rhs, " but replay gives ", lhs, " vs ", rhs);
      ++res.checks;
      if (lhs > rhs + tol)
        fail(res, "t=", rec.t, ": opened batch ", rec.batch,
             " although the top-k mass ", lhs, " still cleared ", rhs);
      PartialRealization fresh = psi_through(trace, open);
      ItemSet m_new = top_k_set(eng, sel, fresh, k);
      ++res.checks;
      if (!m_new.contains(rec.chosen))
        fail(res, "t=", rec.t, ": item ", rec.chosen,
             " is outside the refreshed top-k set");
    }

    sel.add(rec.chosen);
    open = rec.batch;
  }
  return res;
}

AuditResult audit_density_trace(const Instance& inst, double alpha,
                                double budget, const RunTrace& trace,
                                double tol) {
  AuditResult res;
  if (!check_structure(res, trace)) return res;

  ++res.checks;
  if (!trace.used_sampled_pool)
    fail(res, "run carries no sampled candidate pool");
  ++res.checks;
  if (!trace.selected.subset_of(trace.sampled_pool))
    fail(res, "selections left the sampled pool");
  double spent = 0.0;
  for (ItemId e : trace.selection_order) spent += inst.cost(e);
  ++res.checks;
  if (spent > budget + tol)
    fail(res, "selections cost ", spent, " against a budget of ", budget);

  MarginalEngine eng(inst, MarginalMode::exact());
  ItemSet sel;
  int open = 1;
  double opener = 0.0;  // density the open batch's first item had at open
  for (const IterationRecord& rec : trace.iterations) {
    PartialRealization stale = psi_through(trace, open - 1);
    auto [cur, cur_density] =
        argmax_density(eng, trace.sampled_pool.minus(sel), sel, stale);

    if (rec.stayed) {
      if (rec.t == 1) opener = cur_density;
      ++res.checks;
      if (cur != rec.chosen)
        fail(res, "t=", rec.t, ": replay picks item ", cur, " at density ",
             cur_density, " but the log says ", rec.chosen);
      ++res.checks;
      if (!near(cur_density, rec.decision_lhs, tol))
        fail(res, "t=", rec.t, ": logged density ", rec.decision_lhs,
             " but replay gives ", cur_density);
      ++res.checks;
      if (cur_density < alpha * opener - tol)
        fail(res, "t=", rec.t, ": density ", cur_density,
             " stayed in a batch opened at ", opener);
    } else {
      ++res.checks;
      if (cur_density > alpha * opener + tol)
        fail(res, "t=", rec.t, ": batch closed although density ",
             cur_density, " still cleared ", alpha * opener);
      PartialRealization fresh = psi_through(trace, open);
      auto [nxt, nxt_density] = argmax_density(
          eng, trace.sampled_pool.minus(fresh.domain()), fresh.domain(), fresh);
      ++res.checks;
      if (nxt != rec.chosen)
        fail(res, "t=", rec.t, ": replay opens the new batch with item ", nxt,
             " but the log says ", rec.chosen);
      ++res.checks;
      if (!near(nxt_density, rec.decision_lhs, tol) ||
          !near(alpha * nxt_density, rec.decision_rhs, tol))
        fail(res, "t=", rec.t, ": logged opener density ", rec.decision_lhs,
             " but replay gives ", nxt_density);
      ++res.checks;
      if (nxt_density <= tol)
        fail(res, "t=", rec.t, ": new batch opened at density ", nxt_density);
      opener = nxt_density;
    }

    sel.add(rec.chosen);
    open = rec.batch;
  }
  return res;
}

}  // namespace pasm
