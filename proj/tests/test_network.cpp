#include "flowsense/network.hpp"

#include <sstream>

#include <gtest/gtest.h>

#include "flowsense/serialize.hpp"
#include "flowsense/tntp.hpp"
#include "test_util.hpp"

using namespace flowsense;

TEST(LinkFlow, ZeroRouteFlowGivesZeroLinkFlow) {
  const Network net = testutil::make_diamond();
  const auto y = link_flow(net, {0.0, 0.0});
  for (double v : y) EXPECT_DOUBLE_EQ(v, 0.0);
}

TEST(LinkFlow, SingleRouteSpreadsOntoItsLinks) {
  const Network net = testutil::make_diamond();
  const auto y = link_flow(net, {5.0, 0.0});  // route 0 = links {0, 1}
  EXPECT_DOUBLE_EQ(y[0], 5.0);
  EXPECT_DOUBLE_EQ(y[1], 5.0);
  EXPECT_DOUBLE_EQ(y[2], 0.0);
  EXPECT_DOUBLE_EQ(y[3], 0.0);
}

TEST(LinkFlow, SharedLinkAddsUp) {
  Network net = testutil::make_diamond();
  net.routes = {{0, 1}, {0, 1}};  // both routes over the same links
  const auto y = link_flow(net, {2.0, 3.0});
  EXPECT_DOUBLE_EQ(y[0], 5.0);
}

TEST(LinkFlow, DimensionMismatchThrows) {
  const Network net = testutil::make_diamond();
  EXPECT_THROW(link_flow(net, {1.0}), ValidationError);
}

TEST(Incidence, ZeroOneWithOneNonzeroPerHColumn) {
  const Network net = testutil::make_diamond();
  const auto F = dense_link_route_incidence(net);
  const auto H = dense_route_od_incidence(net);
  for (const auto& row : F)
    for (double v : row) EXPECT_TRUE(v == 0.0 || v == 1.0);
  for (int r = 0; r < net.num_routes(); ++r) {
    double col = 0.0;
    for (const auto& row : H) col += row[r];
    EXPECT_DOUBLE_EQ(col, 1.0);
  }
}

TEST(NetworkValidate, RejectsBadLinks) {
  Network net = testutil::make_diamond();
  net.links[0].c = 0.0;
  EXPECT_THROW(net.validate(), ValidationError);
  net = testutil::make_diamond();
  net.links[0].tail = net.links[0].head;
  EXPECT_THROW(net.validate(), ValidationError);
  net = testutil::make_diamond();
  net.demand[0] = -1.0;
  EXPECT_THROW(net.validate(), ValidationError);
  net = testutil::make_diamond();
  net.routes = {{0, 3}, {2, 3}};  // link 0 head != link 3 tail
  EXPECT_THROW(net.validate(), ValidationError);
}

namespace {

constexpr const char* kTinyNet = R"(<NUMBER OF ZONES> 2
<NUMBER OF NODES> 2
<FIRST THRU NODE> 1
<NUMBER OF LINKS> 1
<END OF METADATA>

~ init term capacity length fft b power speed toll type ;
1 2 10 1.0 1 0.15 4 0 0 1 ;
)";

constexpr const char* kTinyTrips = R"(<NUMBER OF ZONES> 2
<TOTAL OD FLOW> 5
<END OF METADATA>

Origin 1
 2 : 5.0;
)";

Network parse(const std::string& net_text, const std::string& trips_text) {
  std::istringstream net(net_text), trips(trips_text);
  return parse_tntp(net, trips);
}

}  // namespace

TEST(Tntp, ReadsLinkValuesVerbatim) {
  const Network net = parse(kTinyNet, kTinyTrips);
  ASSERT_EQ(net.num_links(), 1);
  EXPECT_DOUBLE_EQ(net.links[0].b, 1.0);
  EXPECT_DOUBLE_EQ(net.links[0].c, 10.0);
  EXPECT_DOUBLE_EQ(net.links[0].w, 0.15);  // fft * B
  ASSERT_EQ(net.num_od(), 1);
  EXPECT_DOUBLE_EQ(net.demand[0], 5.0);
  EXPECT_EQ(net.first_thru_node, 0);
}

TEST(Tntp, EmptyStreamIsParseError) {
  std::istringstream net(""), trips("");
  EXPECT_THROW(parse_tntp(net, trips), ParseError);
}

TEST(Tntp, MissingTagNamesTheTag) {
  const std::string no_links = "<NUMBER OF NODES> 2\n<FIRST THRU NODE> 1\n<END OF METADATA>\n";
  std::istringstream net(no_links), trips(kTinyTrips);
  try {
    parse_tntp(net, trips);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("NUMBER OF LINKS"), std::string::npos);
  }
}

TEST(Tntp, NonQuarticPowerRejected) {
  std::string text = kTinyNet;
  text.replace(text.find(" 4 0 0 1"), 2, " 2");
  EXPECT_THROW(parse(text, kTinyTrips), ValidationError);
}

TEST(Tntp, NegativeCapacityRejected) {
  std::string text = kTinyNet;
  text.replace(text.find("1 2 10"), 6, "1 2 -1");
  EXPECT_THROW(parse(text, kTinyTrips), ValidationError);
}

TEST(Tntp, NegativeDemandRejected) {
  EXPECT_THROW(parse(kTinyNet, "<END OF METADATA>\nOrigin 1\n 2 : -3.0;\n"),
               ValidationError);
}

TEST(Tntp, ZeroDemandAndIntrazonalDropped) {
  const Network net =
      parse(kTinyNet, "<END OF METADATA>\nOrigin 1\n 1 : 7.0; 2 : 0.0;\n");
  EXPECT_EQ(net.num_od(), 0);
}

TEST(Tntp, DemandAggregatesAcrossEntries) {
  const Network net =
      parse(kTinyNet, "<END OF METADATA>\nOrigin 1\n 2 : 2.0; 2 : 3.5;\n");
  ASSERT_EQ(net.num_od(), 1);
  EXPECT_DOUBLE_EQ(net.demand[0], 5.5);
}

TEST(Tntp, TripsWithoutMetadataTerminatorStillParse) {
  // first data line must not be swallowed by the metadata scan
  const Network net = parse(kTinyNet, "Origin 1\n 2 : 4.0;\n");
  ASSERT_EQ(net.num_od(), 1);
  EXPECT_DOUBLE_EQ(net.demand[0], 4.0);
}

TEST(Tntp, LinkCountMismatchRejected) {
  std::string text = kTinyNet;
  text.replace(text.find("<NUMBER OF LINKS> 1"), 19, "<NUMBER OF LINKS> 2");
  EXPECT_THROW(parse(text, kTinyTrips), ParseError);
}

TEST(Tntp, NodeCoordinates) {
  Network net = parse(kTinyNet, kTinyTrips);
  std::istringstream nodes("node X Y ;\n1 0.5 1.5 ;\n2 2.5 3.5 ;\n");
  parse_tntp_nodes(nodes, net);
  ASSERT_TRUE(net.has_coordinates());
  EXPECT_DOUBLE_EQ(net.node_x[1], 2.5);
  EXPECT_DOUBLE_EQ(net.node_y[0], 1.5);

  std::istringstream missing("1 0 0 ;\n");
  EXPECT_THROW(parse_tntp_nodes(missing, net), ParseError);
}

TEST(Serialize, NetworkRoundTripsIdentically) {
  Network net = testutil::make_diamond();
  net.node_x = {0, 1, 1, 2};
  net.node_y = {1, 2, 0, 1};
  const json first = json(net);
  const Network back = first.get<Network>();
  EXPECT_EQ(first.dump(), json(back).dump());
}

TEST(Serialize, ParsedNetworkRoundTripsIdentically) {
  const Network net = parse(kTinyNet, kTinyTrips);
  const json first = json(net);
  const Network back = first.get<Network>();
  EXPECT_EQ(first.dump(), json(back).dump());
  EXPECT_EQ(json(back).get<Network>().num_links(), net.num_links());
}

TEST(Serialize, AttackTypeSparseMuRoundTrips) {
  AttackType t;
  t.id = 3;
  t.mu = {0.0, 12.5, 0.0, 0.0, 7.25};
  t.sigma = {0.5, 1.0, 1.5, 2.0, 2.5};
  const json j = json(t);
  EXPECT_EQ(j.at("mu_sparse").size(), 2u);  // only nonzero entries stored
  const AttackType back = j.get<AttackType>();
  EXPECT_EQ(back.mu, t.mu);
  EXPECT_EQ(back.sigma, t.sigma);
  EXPECT_EQ(back.id, t.id);
}
