#pragma once

#include <atomic>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "pointspeak/bounded_queue.hpp"
#include "pointspeak/clock.hpp"
#include "pointspeak/bridge/simulator.hpp"
#include "pointspeak/bridge/socket.hpp"

namespace pointspeak::bridge {

// Robot side of the bridge: hosts the kinematic simulator, accepts
// goal_pose frames and publishes tf (at tf_period) and nav_status frames to
// every connected client.
class BridgeServer {
 public:
  struct Options {
    std::string host = "127.0.0.1";
    int port = kDefaultBridgePort;  // 0 picks a free port
    double tf_period = 0.1;
    SimConfig sim;
    std::shared_ptr<Clock> clock;  // defaults to a SteadyClock
  };

  explicit BridgeServer(Options opts);
  ~BridgeServer();
  BridgeServer(const BridgeServer&) = delete;
  BridgeServer& operator=(const BridgeServer&) = delete;

  void start();
  void stop();

  int port() const { return port_; }
  RobotState state() const;
  int goals_started() const;
  long tf_published() const { return tf_published_.load(); }
  std::size_t client_count() const;
  // Fault injection: closes every client connection.
  void drop_clients();

 private:
  struct Client;

  void accept_loop();
  void tick_loop();
  void read_loop(std::shared_ptr<Client> client);
  void broadcast(const BridgeFrame& frame);

  Options opts_;
  TcpListener listener_;
  int port_ = 0;
  std::atomic<bool> running_{false};
  std::thread accept_thread_;
  std::thread tick_thread_;

  mutable std::mutex sim_mutex_;
  RobotSimulator sim_;

  mutable std::mutex clients_mutex_;
  std::vector<std::shared_ptr<Client>> clients_;
  std::atomic<long> tf_published_{0};
};

// Operator side: keeps a connection to the robot bridge alive, publishes
// goals, and fans received TF out to bounded subscriber queues.
class BridgeClient {
 public:
  struct Options {
    std::string host = "127.0.0.1";
    int port = kDefaultBridgePort;
    double backoff_initial = 0.1;  // s
    double backoff_max = 2.0;      // s
    double stale_after = 1.0;      // s
  };
  using TfQueue = BoundedQueue<TfSample>;

  explicit BridgeClient(Options opts);
  ~BridgeClient();
  BridgeClient(const BridgeClient&) = delete;
  BridgeClient& operator=(const BridgeClient&) = delete;

  void start();
  void stop();

  // Sends now when connected, otherwise on the next successful connect. A
  // goal that was never acknowledged by a status update is re-sent after a
  // reconnect; the server ignores the duplicate if it did arrive.
  void publish_goal(const NavGoal& goal);

  std::shared_ptr<TfQueue> subscribe_tf(std::size_t capacity = 64);
  void on_status(std::function<void(const StatusUpdate&)> cb);

  bool connected() const { return connected_.load(); }
  std::optional<TfSample> latest_tf() const;
  // True when no TF frame arrived within stale_after seconds.
  bool tf_stale() const;
  int connects() const { return connects_.load(); }
  std::optional<StatusUpdate> last_status() const;

  // Fault injection: drops the current connection; the client reconnects.
  void drop_connection();

 private:
  void run();
  void send_locked(const NavGoal& goal);

  Options opts_;
  std::atomic<bool> running_{false};
  std::atomic<bool> connected_{false};
  std::atomic<int> connects_{0};
  std::thread thread_;

  std::mutex io_mutex_;  // guards stream_ writes and goal bookkeeping
  TcpStream stream_;
  std::optional<NavGoal> unacked_;
  std::optional<NavGoal> pending_;

  mutable std::mutex state_mutex_;
  std::optional<TfSample> latest_;
  std::chrono::steady_clock::time_point last_rx_;
  std::optional<StatusUpdate> last_status_;
  std::vector<std::weak_ptr<TfQueue>> subscribers_;
  std::vector<std::function<void(const StatusUpdate&)>> status_callbacks_;
};

}  // namespace pointspeak::bridge
