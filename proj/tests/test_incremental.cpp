#include <gtest/gtest.h>

#include <algorithm>

#include "harness.hpp"
#include "sbc/generators.hpp"
#include "sbc/oracle.hpp"

using namespace sbc;
using sbc::testing::Harness;

namespace {

DynamicGraph make_graph(std::size_t n, std::initializer_list<std::pair<VertexId, VertexId>> edges) {
  DynamicGraph g(n);
  for (auto [a, b] : edges) g.add_edge(a, b);
  return g;
}

void expect_matches_recompute(const Harness& h) {
  auto full = brandes_full_with_data(h.graph());
  for (VertexId s = 0; s < full.sources.size(); ++s) {
    const auto& want = full.sources[s];
    const auto& got = h.sources()[s];
    ASSERT_EQ(want.d, got.d) << "source " << s;
    ASSERT_EQ(want.sigma, got.sigma) << "source " << s;
    for (VertexId v = 0; v < want.size(); ++v) {
      ASSERT_LE(relative_gap(want.delta[v], got.delta[v]), 1e-9) << "source " << s << " v " << v;
    }
  }
  auto dev = compare_scores(oracle_scores(h.graph()), h.scores());
  ASSERT_TRUE(dev.same_edge_set);
  ASSERT_LE(dev.worst(), 1e-9);
}

}  // namespace

TEST(Classify, OrdersEndpointsByDistance) {
  auto c = classify(3, 1, 7, 9);
  EXPECT_EQ(c.high, 9u);
  EXPECT_EQ(c.low, 7u);
  EXPECT_EQ(c.dd, 2u);
  EXPECT_TRUE(classify(kUnreachable, kUnreachable, 0, 1).both_unreachable);
  EXPECT_EQ(classify(2, kUnreachable, 0, 1).dd, kUnreachable);
  EXPECT_TRUE(source_unaffected(4, 4));
  EXPECT_FALSE(source_unaffected(4, 5));
}

TEST(Incremental, TriangleFromPath) {
  Harness h(make_graph(3, {{0, 1}, {1, 2}}));
  h.apply(EdgeEvent::add(0, 2));
  for (double x : h.scores().vbc) EXPECT_DOUBLE_EQ(x, 0.0);
  for (auto& [e, x] : h.scores().ebc) EXPECT_DOUBLE_EQ(x, 2.0);
  expect_matches_recompute(h);
}

TEST(Incremental, RiseOnPathShortcut) {
  Harness h(make_graph(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}}));
  h.apply(EdgeEvent::add(0, 4));
  EXPECT_GT(h.routes()[std::size_t(UpdateRoute::add_rise)], 0u);
  expect_matches_recompute(h);
}

TEST(Incremental, DiamondRemovalKeepsLevels) {
  Harness h(make_graph(4, {{0, 1}, {0, 2}, {1, 3}, {2, 3}}));
  h.apply(EdgeEvent::remove(1, 3));
  EXPECT_GT(h.routes()[std::size_t(UpdateRoute::remove_no_level_change)], 0u);
  expect_matches_recompute(h);
}

TEST(Incremental, BridgeRemovalDisconnects) {
  Harness h(make_graph(4, {{0, 1}, {1, 2}, {2, 3}}));
  h.apply(EdgeEvent::remove(1, 2));
  EXPECT_GT(h.routes()[std::size_t(UpdateRoute::remove_disconnect)], 0u);
  expect_matches_recompute(h);
}

TEST(Incremental, NewVertexAndMerge) {
  Harness h(make_graph(4, {{0, 1}, {2, 3}}));
  h.apply(EdgeEvent::add(1, 4));
  EXPECT_GT(h.routes()[std::size_t(UpdateRoute::new_vertex)], 0u);
  expect_matches_recompute(h);
  h.apply(EdgeEvent::add(4, 2));
  EXPECT_GT(h.routes()[std::size_t(UpdateRoute::component_merge)], 0u);
  expect_matches_recompute(h);
}

TEST(Incremental, RandomStreamsMatchRecompute) {
  RouteCounts total{};
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    for (bool one_level : {true, false}) {
      auto g = random_gnm(12 + seed % 20, 2 * (12 + seed % 20), seed);
      Harness h(g, UpdateOptions{one_level});
      StreamOptions opts;
      opts.new_vertex_probability = 0.1;
      opts.merge_probability = 0.1;
      auto events = random_event_stream(g, 40, seed * 7919, opts);
      for (std::size_t i = 0; i < events.size(); ++i) {
        SCOPED_TRACE("seed " + std::to_string(seed) + " event " + std::to_string(i));
        h.apply(events[i]);
        expect_matches_recompute(h);
        if (::testing::Test::HasFatalFailure()) return;
      }
      for (std::size_t r = 0; r < kRouteCount; ++r) total[r] += h.routes()[r];
    }
  }
  for (std::size_t r = 0; r < kRouteCount; ++r) {
    EXPECT_GT(total[r], 0u) << route_name(UpdateRoute(r));
  }
}

TEST(Incremental, TriangleMinusChordIsPath) {
  Harness h(make_graph(3, {{0, 1}, {1, 2}, {0, 2}}));
  h.apply(EdgeEvent::remove(0, 2));
  EXPECT_EQ(h.scores().vbc, (std::vector<double>{0, 2, 0}));
  EXPECT_EQ(h.scores().edge(0, 1), 4.0);
  EXPECT_EQ(h.scores().edge(1, 2), 4.0);
  expect_matches_recompute(h);
}

TEST(Incremental, PendantGainsSecondPath) {
  Harness h(make_graph(4, {{0, 1}, {1, 2}, {0, 2}, {2, 3}}));
  h.apply(EdgeEvent::add(1, 3));
  EXPECT_EQ(h.sources()[0].sigma[3], 2u);
  expect_matches_recompute(h);
}

TEST(Incremental, KiteRemovalFindsPivot) {
  auto g = make_graph(4, {{0, 1}, {1, 2}, {2, 3}, {3, 1}});
  auto after = g;
  after.remove_edge(1, 2);
  auto bd = brandes_full_with_data(g).sources[0];
  SourceUpdater up;
  AppliedEvent ev{EventKind::remove, 1, 2, false};
  auto search = up.find_pivots(after, ev, 0, bd, classify(bd, 1, 2));
  EXPECT_EQ(search.lost, (std::vector<VertexId>{2}));
  EXPECT_EQ(search.pivots, (std::vector<VertexId>{3}));
  EXPECT_EQ(search.first, 2u);

  Harness h(g);
  h.apply(EdgeEvent::remove(1, 2));
  expect_matches_recompute(h);
}

TEST(Incremental, SecondRemovalOnTwoPaths) {
  Harness h(make_graph(5, {{0, 1}, {1, 3}, {0, 2}, {2, 3}, {3, 4}}));
  h.apply(EdgeEvent::remove(1, 3));
  expect_matches_recompute(h);
  h.apply(EdgeEvent::remove(2, 3));
  expect_matches_recompute(h);
}

TEST(Incremental, PathOfTwoDisconnects) {
  Harness h(make_graph(2, {{0, 1}}));
  h.apply(EdgeEvent::remove(0, 1));
  EXPECT_TRUE(h.scores().ebc.empty());
  EXPECT_EQ(h.scores().vbc, (std::vector<double>{0, 0}));
  EXPECT_EQ(h.sources()[0].d[1], kUnreachable);
}

TEST(Incremental, PathSplitLeavesIsolatedVertex) {
  Harness h(make_graph(3, {{0, 1}, {1, 2}}));
  h.apply(EdgeEvent::remove(1, 2));
  EXPECT_EQ(h.scores().vbc, (std::vector<double>{0, 0, 0}));
  EXPECT_EQ(h.scores().edge(0, 1), 2.0);
  EXPECT_EQ(h.sources()[2].d[0], kUnreachable);
  expect_matches_recompute(h);
}

TEST(Incremental, MergeTwoEdgesIntoPath) {
  Harness h(make_graph(4, {{0, 1}, {2, 3}}));
  h.apply(EdgeEvent::add(1, 2));
  expect_matches_recompute(h);
  EXPECT_EQ(h.scores().vbc, (std::vector<double>{0, 4, 4, 0}));
}

TEST(Incremental, CycleChordIsSkippedBySiblings) {
  Harness h(make_graph(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}}));
  auto before = h.sources()[0];
  h.apply(EdgeEvent::add(1, 3));
  EXPECT_EQ(h.sources()[0], before);
  expect_matches_recompute(h);

  SourceData bd = before;
  CentralityScores unused;
  DirectSink sink(unused);
  SourceUpdater up;
  auto route = up.update(h.graph(), AppliedEvent{EventKind::add, 1, 3, false}, 0, bd, sink);
  EXPECT_EQ(route, UpdateRoute::skip_same_level);
  EXPECT_EQ(up.last_touched(), 0u);
}

TEST(Incremental, AddThenRemoveRestores) {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    auto g = random_gnm(25, 50, seed);
    Harness h(g);
    auto sources = h.sources();
    auto scores = h.scores();
    auto ev = random_event_stream(g, 1, seed, StreamOptions{1.0, 0.0, 0.0}).front();
    h.apply(ev);
    h.apply(EdgeEvent::remove(ev.u1, ev.u2));
    for (VertexId s = 0; s < sources.size(); ++s) {
      ASSERT_EQ(h.sources()[s].d, sources[s].d);
      ASSERT_EQ(h.sources()[s].sigma, sources[s].sigma);
    }
    ASSERT_LE(compare_scores(scores, h.scores()).worst(), 1e-9);
  }
}

TEST(Incremental, PivotsKeepTheirDistance) {
  std::size_t checked = 0;
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    auto g = random_gnm(30, 45, seed);
    auto full = brandes_full_with_data(g);
    SourceUpdater up;
    for (const Edge& e : g.edges()) {
      auto after = g;
      after.remove_edge(e.u, e.v);
      AppliedEvent ev{EventKind::remove, e.u, e.v, false};
      for (VertexId s = 0; s < g.vertex_count(); ++s) {
        const auto& bd = full.sources[s];
        auto cls = classify(bd, e.u, e.v);
        if (cls.dd != 1) continue;
        auto search = up.find_pivots(after, ev, s, bd, cls);
        auto fresh = bfs_distances(after, s);
        for (VertexId p : search.pivots) ASSERT_EQ(fresh[p], bd.d[p]);
        for (VertexId v = 0; v < g.vertex_count(); ++v) {
          if (fresh[v] == bd.d[v]) continue;
          ASSERT_NE(std::find(search.lost.begin(), search.lost.end(), v), search.lost.end());
        }
        ++checked;
      }
    }
  }
  EXPECT_GT(checked, 1000u);
}

// The one-level-drop route must reproduce the generic pivot route.
TEST(Incremental, OneLevelDropMatchesGenericRoute) {
  std::size_t compared = 0;
  std::size_t fewer_or_equal = 0;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    auto g = random_gnm(40, 90, seed);
    auto full = brandes_full_with_data(g);
    const auto edges = g.edges();
    for (std::size_t k = 0; k < edges.size(); k += 7) {
      const Edge e = edges[k];
      auto after = g;
      after.remove_edge(e.u, e.v);
      AppliedEvent ev{EventKind::remove, e.u, e.v, false};
      for (VertexId s = 0; s < g.vertex_count(); ++s) {
        SourceData fast = full.sources[s];
        SourceData slow = full.sources[s];
        CentralityScores sf, ss;
        sf.vbc.assign(g.vertex_count(), 0);
        ss.vbc.assign(g.vertex_count(), 0);
        DirectSink kf(sf), ks(ss);
        SourceUpdater quick(UpdateOptions{true});
        SourceUpdater generic(UpdateOptions{false});
        auto route = quick.update(after, ev, s, fast, kf);
        if (route != UpdateRoute::remove_one_level_drop) continue;
        generic.update(after, ev, s, slow, ks);
        ASSERT_EQ(fast.d, slow.d);
        ASSERT_EQ(fast.sigma, slow.sigma);
        for (VertexId v = 0; v < fast.size(); ++v) {
          ASSERT_LE(relative_gap(fast.delta[v], slow.delta[v]), 1e-9);
          ASSERT_LE(relative_gap(sf.vbc[v], ss.vbc[v]), 1e-9);
        }
        for (auto& [edge, x] : sf.ebc) ASSERT_LE(relative_gap(x, ss.edge(edge.u, edge.v)), 1e-9);
        ++compared;
        if (quick.last_touched() <= generic.last_touched()) ++fewer_or_equal;
      }
    }
  }
  EXPECT_GT(compared, 100u);
  EXPECT_EQ(fewer_or_equal, compared);
}
