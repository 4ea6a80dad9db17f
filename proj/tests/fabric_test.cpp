#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "gspn/error.hpp"
#include "gspn/fabric.hpp"
#include "gspn/marking.hpp"
#include "gspn/metrics.hpp"
#include "gspn/net_io.hpp"
#include "oracles.hpp"

namespace gspn {
namespace {

TEST(DefaultParams, MeasuredStageRates) {
  auto p = default_params();
  EXPECT_EQ(p.mu_http, 500.0);
  EXPECT_EQ(p.mu_endorse, 143.0);
  EXPECT_EQ(p.mu_order, 83.0);
  EXPECT_EQ(p.mu_commit, 37.0);
  EXPECT_EQ(p.mu_net, 100.0);
  EXPECT_EQ(p.batch_n, 1u);
  EXPECT_EQ(p.http_servers, 1u);
  EXPECT_EQ(p.endorsers, 1u);
  EXPECT_EQ(p.orderers, 1u);
  // Measured stage latencies, rounded to whole milliseconds.
  const double rates[] = {p.mu_http, p.mu_endorse, p.mu_order, p.mu_commit, p.mu_net};
  const double latencies[] = {2, 7, 12, 27, 10};
  for (int i = 0; i < 5; ++i) EXPECT_EQ(std::round(1000.0 / rates[i]), latencies[i]);
}

TEST(FabricParams, Validation) {
  auto p = default_params();
  p.mu_commit = 0.0;
  EXPECT_THROW(build_fabric_net(p), NetError);
  p = default_params();
  p.batch_n = 0;
  EXPECT_THROW(build_fabric_net(p), NetError);
  p = default_params();
  p.lambda = -1.0;
  EXPECT_THROW(build_fabric_net(p), NetError);
  p = default_params();
  p.endorsers = 0;
  EXPECT_THROW(build_fabric_net(p), NetError);
}

TEST(BuildFabricNet, LabelingCoversEveryPlaceOnce) {
  auto model = build_fabric_net(default_params());
  for (std::uint32_t i = 0; i < model.net.place_count(); ++i) {
    EXPECT_TRUE(model.labeling.phase_of(PlaceId{i}).has_value()) << model.net.place(PlaceId{i}).name;
  }
  std::set<std::uint32_t> seen;
  for (const auto& layout : model.labeling.phases) {
    auto mark = [&](PlaceId p) { EXPECT_TRUE(seen.insert(p.index).second) << model.net.place(p).name; };
    for (const auto& u : layout.units) {
      mark(u.wait);
      mark(u.serve);
      mark(u.idle);
    }
    if (layout.delay) mark(*layout.delay);
    for (auto p : layout.other_places) mark(p);
  }
  EXPECT_EQ(seen.size(), model.net.place_count());
  EXPECT_EQ(model.labeling.layout(Phase::kCommitting).units.size(), 2u);
}

TEST(BuildFabricNet, UnitBatchIsPlainTandem) {
  auto model = build_fabric_net(default_params());
  for (const auto& t : model.net.transitions()) {
    for (const auto& a : t.inputs) EXPECT_EQ(a.weight, 1u) << t.name;
    for (const auto& a : t.outputs) EXPECT_EQ(a.weight, 1u) << t.name;
  }
  const auto& in_h = model.net.transition(model.net.transition_id("T_in_h"));
  EXPECT_EQ(format_guard(*in_h.guard, model.net), "#(P_wait_h) > 0 && #(P_idle_h) > 0");
}

TEST(BuildFabricNet, OrderingAdmissionNeedsBatch) {
  auto params = default_params();
  params.batch_n = 3;
  auto model = build_fabric_net(params);
  const auto& net = model.net;
  auto admit = net.transition_id("T_in_o");
  auto wait = net.place_id("P_wait_o");
  EXPECT_EQ(format_guard(*net.transition(admit).guard, net), "#(P_wait_o) >= 3 && #(P_idle_o) > 0");
  auto m = Marking::initial(net);
  m.push(wait, Token{});
  m.push(wait, Token{});
  EXPECT_FALSE(is_enabled(net, m, admit));
  m.push(wait, Token{});
  EXPECT_TRUE(is_enabled(net, m, admit));
  fire_in_place(net, m, admit, 0.0);
  EXPECT_EQ(m.count(wait), 0u);
  EXPECT_EQ(m.count(net.place_id("P_serve_o")), 1u);
}

TEST(BuildFabricNet, JoinExpandsBlockIntoRequests) {
  auto params = default_params();
  params.batch_n = 4;
  auto model = build_fabric_net(params);
  const auto& join = model.net.transition(model.net.transition_id("T_join"));
  ASSERT_EQ(join.inputs.size(), 2u);
  ASSERT_EQ(join.outputs.size(), 1u);
  EXPECT_EQ(join.outputs[0].place, model.net.place_id("P_end"));
  EXPECT_EQ(join.outputs[0].weight, 4u);
  const auto& order = model.net.transition(model.net.transition_id("T_o"));
  EXPECT_EQ(order.outputs.size(), 3u);  // idle token back + one copy per committer
}

TEST(BuildFabricNet, SerializedNetReparsesIdentically) {
  auto params = default_params();
  params.batch_n = 5;
  auto model = build_fabric_net(params);
  auto again = parse_net(serialize_net(model.net));
  EXPECT_EQ(again, model.net);
  auto relabeled = label_fabric_net(again);
  for (auto phase : kAllPhases) {
    const auto& a = relabeled.layout(phase);
    const auto& b = model.labeling.layout(phase);
    ASSERT_EQ(a.units.size(), b.units.size());
    for (std::size_t i = 0; i < a.units.size(); ++i) {
      EXPECT_EQ(a.units[i].wait, b.units[i].wait);
      EXPECT_EQ(a.units[i].service, b.units[i].service);
    }
    EXPECT_EQ(a.delay, b.delay);
    EXPECT_EQ(a.other_places, b.other_places);
  }
}

TEST(FabricParamsFile, ParsesOverridesAndKeepsDefaults) {
  auto p = parse_fabric_params(R"({"lambda": 160, "batch_n": 5, "mu_commit": 30.4, "horizon": 99})");
  EXPECT_EQ(p.lambda, 160.0);
  EXPECT_EQ(p.batch_n, 5u);
  EXPECT_EQ(p.mu_commit, 30.4);
  EXPECT_EQ(p.mu_endorse, 143.0);
  EXPECT_EQ(parse_fabric_params(serialize_fabric_params(p)), p);
  EXPECT_THROW(parse_fabric_params("{"), ParseError);
  EXPECT_THROW(parse_fabric_params(R"({"batch_n": 0})"), ParseError);
  EXPECT_THROW(parse_fabric_params(R"({"lambda": "fast"})"), ParseError);
}

TEST(FabricModel, BatchConsistency) {
  auto params = default_params();
  params.batch_n = 3;
  params.lambda = 60.0;
  auto model = build_fabric_net(params);
  SimConfig c;
  c.horizon = 300.0;
  auto trace = simulate(model.net, c);
  auto admit = model.net.transition_id("T_in_o");
  auto wait = model.net.place_id("P_wait_o");
  EXPECT_EQ(trace.firings[admit.index] * 3, trace.stats(wait).departures);
}

TEST(FabricModel, RequestsAreConserved) {
  auto params = default_params();
  params.lambda = 20.0;
  params.batch_n = 2;
  auto model = build_fabric_net(params);
  SimConfig c;
  c.horizon = 500.0;
  auto trace = simulate(model.net, c);
  auto arrivals = trace.firings[model.net.transition_id("T_arr").index];
  auto delivered = trace.stats(model.net.place_id("P_out")).arrivals;
  // Everything not delivered is still in flight: at most a partial batch plus a few blocks.
  std::uint64_t in_flight = 0;
  for (const char* name : {"P_wait_h", "P_serve_h", "P_wait_e", "P_serve_e", "P_wait_o", "P_end"})
    in_flight += trace.final_counts[model.net.place_id(name).index];
  for (const char* name : {"P_serve_o", "P_wait_c0", "P_serve_c0", "P_done_c0"})
    in_flight += 2 * trace.final_counts[model.net.place_id(name).index];
  EXPECT_GE(arrivals, delivered);
  EXPECT_LE(arrivals - delivered, in_flight + 2 * 2);
  EXPECT_LT(static_cast<double>(arrivals - delivered), 0.01 * static_cast<double>(arrivals));
}

TEST(FabricModel, LowLoadPhaseLatenciesMatchServiceTimes) {
  auto params = default_params();
  params.lambda = 2.0;
  auto model = build_fabric_net(params);
  SimConfig c;
  c.horizon = 4000.0;
  c.seed = 21;
  auto reps = replicate(model.net, c, 3);
  const double rates[] = {params.mu_http, params.mu_endorse, params.mu_order, params.mu_commit};
  for (int i = 0; i < 4; ++i) {
    double sum = 0.0;
    for (const auto& t : reps) sum += *phase_latency(t, model.labeling, kAllPhases[i]);
    double mean = sum / 3.0;
    double expected = 1000.0 * oracle::mm1_sojourn(params.lambda, rates[i]);
    EXPECT_NEAR(mean, expected, 0.05 * expected) << to_string(kAllPhases[i]);
  }
}

TEST(FabricModel, TaggedEndToEndLatency) {
  auto params = default_params();
  params.lambda = 10.0;
  params.batch_n = 2;
  auto model = build_fabric_net(params);
  SimConfig c;
  c.horizon = 500.0;
  c.track_tags = true;
  auto trace = simulate(model.net, c);
  auto r = system_report(trace, model.labeling);
  ASSERT_TRUE(r.end_to_end_ms);
  ASSERT_TRUE(r.delta_ms);
  EXPECT_GT(*r.end_to_end_ms, 0.0);
  // Both estimates count the same stations; the sum of phase means ignores
  // join waiting, so it cannot exceed the tag-based figure by much.
  EXPECT_LT(*r.delta_ms, *r.end_to_end_ms * 1.1);
}

}  // namespace
}  // namespace gspn
