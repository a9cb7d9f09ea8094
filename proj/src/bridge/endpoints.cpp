#include "pointspeak/bridge/endpoints.hpp"

#include <algorithm>
#include <array>

namespace pointspeak::bridge {

struct BridgeServer::Client {
  TcpStream stream;
  std::mutex write_mutex;
  std::atomic<bool> alive{true};
  std::thread reader;
};

BridgeServer::BridgeServer(Options opts) : opts_(std::move(opts)), sim_(opts_.sim) {
  if (!opts_.clock) opts_.clock = std::make_shared<SteadyClock>();
  if (!(opts_.tf_period > 0.0)) throw std::invalid_argument("tf_period must be > 0");
}

BridgeServer::~BridgeServer() { stop(); }

void BridgeServer::start() {
  listener_ = TcpListener::bind(opts_.host, opts_.port);
  port_ = listener_.port();
  running_ = true;
  accept_thread_ = std::thread([this] { accept_loop(); });
  tick_thread_ = std::thread([this] { tick_loop(); });
}

void BridgeServer::stop() {
  if (!running_.exchange(false)) return;
  if (accept_thread_.joinable()) accept_thread_.join();
  if (tick_thread_.joinable()) tick_thread_.join();
  listener_.close();
  std::vector<std::shared_ptr<Client>> clients;
  {
    std::lock_guard lock(clients_mutex_);
    clients.swap(clients_);
  }
  for (auto& c : clients) {
    c->alive = false;
    c->stream.shutdown();
    if (c->reader.joinable()) c->reader.join();
  }
}

RobotState BridgeServer::state() const {
  std::lock_guard lock(sim_mutex_);
  return sim_.state();
}

int BridgeServer::goals_started() const {
  std::lock_guard lock(sim_mutex_);
  return sim_.goals_started();
}

std::size_t BridgeServer::client_count() const {
  std::lock_guard lock(clients_mutex_);
  return static_cast<std::size_t>(std::count_if(
      clients_.begin(), clients_.end(), [](const auto& c) { return c->alive.load(); }));
}

void BridgeServer::drop_clients() {
  std::lock_guard lock(clients_mutex_);
  for (auto& c : clients_) {
    c->alive = false;
    c->stream.shutdown();
  }
}

void BridgeServer::accept_loop() {
  while (running_) {
    TcpStream s = listener_.accept(0.05);
    if (!s.valid()) continue;
    auto client = std::make_shared<Client>();
    client->stream = std::move(s);
    std::lock_guard lock(clients_mutex_);
    // Reap finished readers before adding the new connection.
    std::erase_if(clients_, [](const std::shared_ptr<Client>& c) {
      if (c->alive) return false;
      if (c->reader.joinable()) c->reader.join();
      return true;
    });
    client->reader = std::thread([this, client] { read_loop(client); });
    clients_.push_back(std::move(client));
  }
}

void BridgeServer::read_loop(std::shared_ptr<Client> client) {
  FrameDecoder decoder;
  std::array<std::uint8_t, 4096> buf{};
  try {
    while (running_ && client->alive) {
      const std::size_t n = client->stream.read_some(buf, 0.05);
      if (n == 0) continue;
      decoder.feed(std::span<const std::uint8_t>(buf.data(), n));
      while (auto frame = decoder.next()) {
        if (frame->topic != kTopicGoal) continue;
        const NavGoal goal = parse_goal(*frame);
        std::lock_guard lock(sim_mutex_);
        sim_.submit(goal);
      }
    }
  } catch (const std::exception&) {
    // Peer closed or spoke garbage; the connection is dropped either way.
  }
  client->alive = false;
}

void BridgeServer::broadcast(const BridgeFrame& frame) {
  const std::vector<std::uint8_t> bytes = encode_frame(frame);
  std::vector<std::shared_ptr<Client>> targets;
  {
    std::lock_guard lock(clients_mutex_);
    targets = clients_;
  }
  for (auto& c : targets) {
    if (!c->alive) continue;
    std::lock_guard lock(c->write_mutex);
    try {
      c->stream.write_all(bytes);
    } catch (const SocketError&) {
      c->alive = false;
      c->stream.shutdown();
    }
  }
}

void BridgeServer::tick_loop() {
  Clock& clock = *opts_.clock;
  const double dt = opts_.sim.tick;
  double next_tick = clock.now();
  double next_tf = next_tick;
  NavStatus last_status = NavStatus::Idle;
  while (running_) {
    std::optional<BridgeFrame> status_msg;
    RobotState snapshot;
    {
      std::lock_guard lock(sim_mutex_);
      sim_.tick(dt);
      snapshot = sim_.state();
      if (snapshot.status != last_status) {
        last_status = snapshot.status;
        status_msg = status_frame({snapshot.status, sim_.status_goal_id()});
      }
    }
    if (status_msg) broadcast(*status_msg);
    const double now = clock.now();
    if (now >= next_tf) {
      broadcast(tf_frame({snapshot.pose, now}));
      ++tf_published_;
      next_tf += opts_.tf_period;
      if (next_tf < now) next_tf = now + opts_.tf_period;
    }
    next_tick += dt;
    clock.sleep_until(std::min(next_tick, next_tf));
    if (clock.now() < next_tick) clock.sleep_until(next_tick);
  }
}

BridgeClient::BridgeClient(Options opts) : opts_(std::move(opts)) {}

BridgeClient::~BridgeClient() { stop(); }

void BridgeClient::start() {
  running_ = true;
  thread_ = std::thread([this] { run(); });
}

void BridgeClient::stop() {
  if (!running_.exchange(false)) return;
  {
    std::lock_guard lock(io_mutex_);
    stream_.shutdown();
  }
  if (thread_.joinable()) thread_.join();
  std::lock_guard lock(state_mutex_);
  for (auto& w : subscribers_) {
    if (auto q = w.lock()) q->close();
  }
}

void BridgeClient::send_locked(const NavGoal& goal) {
  stream_.write_all(encode_frame(goal_frame(goal)));
  unacked_ = goal;
  pending_.reset();
}

void BridgeClient::publish_goal(const NavGoal& goal) {
  std::lock_guard lock(io_mutex_);
  if (connected_) {
    try {
      send_locked(goal);
      return;
    } catch (const SocketError&) {
      stream_.shutdown();
    }
  }
  pending_ = goal;
}

std::shared_ptr<BridgeClient::TfQueue> BridgeClient::subscribe_tf(std::size_t capacity) {
  auto q = std::make_shared<TfQueue>(capacity);
  std::lock_guard lock(state_mutex_);
  subscribers_.push_back(q);
  return q;
}

void BridgeClient::on_status(std::function<void(const StatusUpdate&)> cb) {
  std::lock_guard lock(state_mutex_);
  status_callbacks_.push_back(std::move(cb));
}

std::optional<TfSample> BridgeClient::latest_tf() const {
  std::lock_guard lock(state_mutex_);
  return latest_;
}

bool BridgeClient::tf_stale() const {
  std::lock_guard lock(state_mutex_);
  if (!latest_) return true;
  const double age =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - last_rx_).count();
  return age > opts_.stale_after;
}

std::optional<StatusUpdate> BridgeClient::last_status() const {
  std::lock_guard lock(state_mutex_);
  return last_status_;
}

void BridgeClient::drop_connection() {
  std::lock_guard lock(io_mutex_);
  stream_.shutdown();
}

void BridgeClient::run() {
  double backoff = opts_.backoff_initial;
  std::array<std::uint8_t, 4096> buf{};
  while (running_) {
    TcpStream s;
    try {
      s = TcpStream::connect(opts_.host, opts_.port, 1.0);
    } catch (const SocketError&) {
      std::this_thread::sleep_for(std::chrono::duration<double>(backoff));
      backoff = std::min(backoff * 2.0, opts_.backoff_max);
      continue;
    }
    backoff = opts_.backoff_initial;
    {
      std::lock_guard lock(io_mutex_);
      stream_ = std::move(s);
      connected_ = true;
      ++connects_;
      try {
        if (pending_) {
          send_locked(*pending_);
        } else if (unacked_) {
          send_locked(*unacked_);
        }
      } catch (const SocketError&) {
        stream_.shutdown();
      }
    }

    FrameDecoder decoder;
    try {
      while (running_) {
        const std::size_t n = stream_.read_some(buf, 0.05);
        if (n == 0) continue;
        decoder.feed(std::span<const std::uint8_t>(buf.data(), n));
        while (auto frame = decoder.next()) {
          if (frame->topic == kTopicTf) {
            const TfSample tf = parse_tf(*frame);
            std::lock_guard lock(state_mutex_);
            latest_ = tf;
            last_rx_ = std::chrono::steady_clock::now();
            std::erase_if(subscribers_, [&](std::weak_ptr<TfQueue>& w) {
              auto q = w.lock();
              if (!q) return true;
              q->push(tf);
              return false;
            });
          } else if (frame->topic == kTopicStatus) {
            const StatusUpdate st = parse_status(*frame);
            std::vector<std::function<void(const StatusUpdate&)>> callbacks;
            {
              std::lock_guard io(io_mutex_);
              if (unacked_ && unacked_->goal_id == st.goal_id) unacked_.reset();
            }
            {
              std::lock_guard lock(state_mutex_);
              last_status_ = st;
              callbacks = status_callbacks_;
            }
            for (auto& cb : callbacks) cb(st);
          }
        }
      }
    } catch (const std::exception&) {
      // Fall through to reconnect.
    }
    {
      std::lock_guard lock(io_mutex_);
      connected_ = false;
      stream_.close();
    }
    if (running_) std::this_thread::sleep_for(std::chrono::duration<double>(backoff));
  }
}

}  // namespace pointspeak::bridge
