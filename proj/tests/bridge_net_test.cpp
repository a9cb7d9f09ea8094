#include <gtest/gtest.h>

#include <chrono>
#include <thread>

#include "pointspeak/bridge/endpoints.hpp"

using namespace pointspeak;
using namespace pointspeak::bridge;
using namespace std::chrono_literals;

namespace {

template <typename Pred>
bool wait_for(Pred pred, std::chrono::milliseconds limit = 5000ms) {
  const auto end = std::chrono::steady_clock::now() + limit;
  while (std::chrono::steady_clock::now() < end) {
    if (pred()) return true;
    std::this_thread::sleep_for(10ms);
  }
  return pred();
}

BridgeServer::Options server_opts() {
  BridgeServer::Options o;
  o.port = 0;
  return o;
}

BridgeClient::Options client_opts(int port) {
  BridgeClient::Options o;
  o.port = port;
  o.backoff_initial = 0.05;
  o.backoff_max = 0.2;
  return o;
}

}  // namespace

TEST(BridgeNet, GoalReachesSimulatorAndRobotArrives) {
  BridgeServer server(server_opts());
  server.start();
  BridgeClient client(client_opts(server.port()));
  std::vector<StatusUpdate> statuses;
  std::mutex m;
  client.on_status([&](const StatusUpdate& s) {
    std::lock_guard lock(m);
    statuses.push_back(s);
  });
  client.start();
  ASSERT_TRUE(wait_for([&] { return client.connected(); }));

  const NavGoal goal{make_pose({0.5, 0, 0}, 0), "beacon#1"};
  client.publish_goal(goal);
  ASSERT_TRUE(wait_for([&] { return server.goals_started() == 1; }));
  ASSERT_TRUE(wait_for([&] {
    const auto s = client.last_status();
    return s && s->status == NavStatus::Arrived && s->goal_id == "beacon#1";
  }));
  EXPECT_TRUE(within_tolerance(server.state().pose, goal.pose, SimConfig{}));
  const auto tf = client.latest_tf();
  ASSERT_TRUE(tf);
  EXPECT_NEAR(tf->pose.position.x, 0.5, 0.05);
  client.stop();
  server.stop();
}

TEST(BridgeNet, TfRateAtRest) {
  BridgeServer server(server_opts());
  server.start();
  BridgeClient client(client_opts(server.port()));
  auto q = client.subscribe_tf(1024);
  client.start();
  ASSERT_TRUE(wait_for([&] { return client.connected(); }));
  while (q->try_pop()) {
  }
  const auto start = std::chrono::steady_clock::now();
  int frames = 0;
  while (std::chrono::steady_clock::now() - start < 5s) {
    if (q->pop(50ms)) ++frames;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  EXPECT_GE(frames / secs, 9.0) << frames << " frames in " << secs << " s";
  EXPECT_FALSE(client.tf_stale());
  client.stop();
  server.stop();
}

TEST(BridgeNet, ReconnectDoesNotRepeatGoal) {
  BridgeServer server(server_opts());
  server.start();
  BridgeClient client(client_opts(server.port()));
  client.start();
  ASSERT_TRUE(wait_for([&] { return client.connected(); }));
  client.publish_goal({make_pose({2, 0, 0}, 0), "b#7"});
  ASSERT_TRUE(wait_for([&] { return server.goals_started() == 1; }));

  server.drop_clients();
  ASSERT_TRUE(wait_for([&] { return client.connects() >= 2 && client.connected(); }));
  std::this_thread::sleep_for(300ms);
  EXPECT_EQ(server.goals_started(), 1);

  client.drop_connection();
  ASSERT_TRUE(wait_for([&] { return client.connects() >= 3 && client.connected(); }));
  client.publish_goal({make_pose({2, 0, 0}, 0), "b#7"});
  std::this_thread::sleep_for(300ms);
  EXPECT_EQ(server.goals_started(), 1);

  client.publish_goal({make_pose({0, 0, 0}, 0), "b#8"});
  ASSERT_TRUE(wait_for([&] { return server.goals_started() == 2; }));
  client.stop();
  server.stop();
}

TEST(BridgeNet, GoalSentWhileDisconnectedIsDeliveredLater) {
  BridgeServer::Options so = server_opts();
  BridgeServer probe(so);
  probe.start();
  const int port = probe.port();
  probe.stop();

  BridgeClient client(client_opts(port));
  client.start();
  client.publish_goal({make_pose({0.2, 0, 0}, 0), "late#1"});
  std::this_thread::sleep_for(200ms);
  EXPECT_FALSE(client.connected());

  so.port = port;
  BridgeServer server(so);
  server.start();
  ASSERT_TRUE(wait_for([&] { return server.goals_started() == 1; }));
  client.stop();
  server.stop();
}

TEST(BridgeNet, TfGoesStaleWhenServerStops) {
  auto server = std::make_unique<BridgeServer>(server_opts());
  server->start();
  BridgeClient::Options co = client_opts(server->port());
  co.stale_after = 0.3;
  BridgeClient client(co);
  client.start();
  ASSERT_TRUE(wait_for([&] { return client.latest_tf().has_value(); }));
  EXPECT_FALSE(client.tf_stale());
  server->stop();
  ASSERT_TRUE(wait_for([&] { return client.tf_stale(); }, 3000ms));
  EXPECT_TRUE(client.latest_tf().has_value());
  client.stop();
}

TEST(BridgeNet, GarbageFromPeerDropsOnlyThatConnection) {
  BridgeServer server(server_opts());
  server.start();
  BridgeClient good(client_opts(server.port()));
  good.start();
  ASSERT_TRUE(wait_for([&] { return good.connected(); }));

  TcpStream bad = TcpStream::connect("127.0.0.1", server.port(), 1.0);
  const std::string junk = "\xff\xff\xff\xffnot a frame";
  bad.write_all(std::span(reinterpret_cast<const std::uint8_t*>(junk.data()), junk.size()));
  ASSERT_TRUE(wait_for([&] { return server.client_count() == 1; }));
  EXPECT_TRUE(good.connected());
  good.publish_goal({make_pose({0.1, 0, 0}, 0), "ok#1"});
  EXPECT_TRUE(wait_for([&] { return server.goals_started() == 1; }));
  good.stop();
  server.stop();
}
