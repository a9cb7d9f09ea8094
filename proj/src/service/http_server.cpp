#include "pointspeak/service/http_server.hpp"

#include <poll.h>
#include <sys/socket.h>

#include <chrono>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include "pointspeak/bounded_queue.hpp"

namespace pointspeak::service {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

namespace {

HttpResponse error(int status, const std::string& msg) { return {status, Json{{"error", msg}}}; }

Json parse_body(const std::string& body) {
  Json j = Json::parse(body.empty() ? std::string("{}") : body, nullptr, false);
  if (j.is_discarded()) throw RequestError("request body is not valid JSON");
  if (!j.is_object()) throw RequestError("request body must be a JSON object");
  return j;
}

Vec3 location_field(const Json& j) {
  if (!j.contains("location") || !j["location"].is_array()) {
    throw RequestError("'location' must be [x, y] or [x, y, z]");
  }
  Json loc = j["location"];
  if (loc.size() == 2) loc.push_back(0.0);
  try {
    return vec3_from_json(loc, "location");
  } catch (const JsonFieldError& e) {
    throw RequestError(e.what());
  }
}

HttpResponse route(Session& session, const std::string& method, const std::string& path,
                   const std::string& query, const std::string& body) {
  if (path == "/state") {
    if (method != "GET") return error(405, "use GET");
    return {200, session.state()};
  }
  if (path == "/metrics") {
    if (method != "GET") return error(405, "use GET");
    const bool timings = query.find("timings=0") == std::string::npos;
    return {200, to_json(session.metrics(), timings)};
  }
  if (method != "POST") {
    if (path == "/mode" || path == "/capture" || path == "/labels" || path == "/calibrate") {
      return error(405, "use POST");
    }
    return error(404, "no such endpoint");
  }

  const Json j = parse_body(body);
  if (path == "/mode") {
    if (!j.contains("mode") || !j["mode"].is_string()) throw RequestError("'mode' must be a string");
    const auto m = parse_mode(j["mode"].get<std::string>());
    if (!m) throw RequestError("unknown mode '" + j["mode"].get<std::string>() + "'");
    return {200, Json{{"mode", to_string(session.set_mode(*m))}}};
  }
  if (path == "/capture") {
    const CaptureResult r = session.capture(CaptureRequest::from_json(j));
    return {200, Json{{"outcome", r.payload}, {"t", r.t}}};
  }
  if (path == "/labels") {
    if (!j.contains("name") || !j["name"].is_string()) throw RequestError("'name' must be a string");
    const bool overwrite = j.value("overwrite", false);
    const MRLabel l = session.upsert_label(j["name"].get<std::string>(), location_field(j), overwrite);
    return {200, Json{{"label", to_json(l)}}};
  }
  if (path == "/calibrate") {
    double threshold = 0.0;
    if (j.contains("rms")) {
      if (!j["rms"].is_array()) throw RequestError("'rms' must be an array of numbers");
      std::vector<double> rms;
      for (const auto& v : j["rms"]) {
        if (!v.is_number()) throw RequestError("'rms' must be an array of numbers");
        rms.push_back(v.get<double>());
      }
      std::optional<double> frame_len;
      if (j.contains("frame_len")) {
        if (!j["frame_len"].is_number()) throw RequestError("'frame_len' must be a number");
        frame_len = j["frame_len"].get<double>();
      }
      threshold = session.calibrate_rms(rms, frame_len);
    } else if (j.contains("wav_path") && j["wav_path"].is_string()) {
      threshold = session.calibrate_wav(j["wav_path"].get<std::string>());
    } else {
      throw RequestError("calibrate needs 'rms' or 'wav_path'");
    }
    return {200, Json{{"threshold", threshold}}};
  }
  return error(404, "no such endpoint");
}

}  // namespace

HttpResponse handle_request(Session& session, const std::string& method, const std::string& target,
                            const std::string& body) {
  const std::size_t q = target.find('?');
  const std::string path = target.substr(0, q);
  const std::string query = q == std::string::npos ? "" : target.substr(q + 1);
  if (method == "OPTIONS") return {204, Json()};
  try {
    return route(session, method, path, query, body);
  } catch (const std::invalid_argument& e) {  // includes RequestError
    return error(400, e.what());
  } catch (const JsonFieldError& e) {
    return error(400, e.what());
  } catch (const NotFoundError& e) {
    return error(404, e.what());
  } catch (const ConflictError& e) {
    return error(409, e.what());
  } catch (const std::logic_error& e) {
    return error(409, e.what());
  } catch (const std::exception& e) {
    return error(500, e.what());
  }
}

struct HttpServer::Impl {
  struct Conn {
    tcp::socket socket;
    std::thread thread;
    std::atomic<bool> done{false};
    explicit Conn(asio::io_context& ioc) : socket(ioc) {}
  };

  asio::io_context ioc;
  tcp::acceptor acceptor{ioc};
  std::atomic<bool> running{false};
  std::thread accept_thread;
  std::mutex conns_mutex;
  std::vector<std::shared_ptr<Conn>> conns;
};

HttpServer::HttpServer(Session& session, Options opts)
    : impl_(std::make_unique<Impl>()), session_(session), opts_(std::move(opts)) {}

HttpServer::~HttpServer() { stop(); }

namespace {

template <typename Body>
void add_common_headers(http::response<Body>& res) {
  res.set(http::field::server, "pointspeak");
  res.set(http::field::access_control_allow_origin, "*");
  res.set(http::field::access_control_allow_methods, "GET, POST, OPTIONS");
  res.set(http::field::access_control_allow_headers, "Content-Type");
}

void serve_events(Session& session, tcp::socket& socket, http::request<http::string_body>& req,
                  std::size_t capacity, const std::atomic<bool>& running) {
  websocket::stream<tcp::socket&> ws(socket);
  ws.set_option(websocket::stream_base::decorator(
      [](websocket::response_type& res) { res.set(http::field::server, "pointspeak"); }));
  // Subscribe before the handshake completes so a client that saw the
  // upgrade cannot miss an event.
  auto queue = std::make_shared<BoundedQueue<std::string>>(capacity);
  const int token = session.subscribe([queue](const SessionEvent& e) { queue->push(encode_event(e)); });
  try {
    ws.accept(req);
  } catch (...) {
    session.unsubscribe(token);
    throw;
  }
  ws.text(true);

  // Client messages are ignored; reading keeps control frames flowing and
  // notices the close.
  std::thread reader([&ws, queue] {
    try {
      beast::flat_buffer buf;
      for (;;) {
        ws.read(buf);
        buf.consume(buf.size());
      }
    } catch (const std::exception&) {
    }
    queue->close();
  });

  try {
    while (running) {
      auto msg = queue->pop(std::chrono::milliseconds(100));
      if (!msg) {
        if (queue->closed()) break;
        continue;
      }
      ws.write(asio::buffer(*msg));
    }
  } catch (const std::exception&) {
  }
  session.unsubscribe(token);
  queue->close();
  ::shutdown(socket.native_handle(), SHUT_RDWR);
  reader.join();
}

void serve_connection(Session& session, tcp::socket& socket, std::size_t capacity,
                      const std::atomic<bool>& running) {
  try {
    beast::flat_buffer buf;
    while (running) {
      http::request<http::string_body> req;
      http::read(socket, buf, req);
      const std::string target(req.target());
      if (websocket::is_upgrade(req)) {
        if (target.substr(0, target.find('?')) == "/events") {
          serve_events(session, socket, req, capacity, running);
          return;
        }
        http::response<http::string_body> res{http::status::not_found, req.version()};
        res.body() = R"({"error":"no such endpoint"})";
        res.prepare_payload();
        http::write(socket, res);
        return;
      }

      const HttpResponse r =
          handle_request(session, std::string(req.method_string()), target, req.body());
      http::response<http::string_body> res{static_cast<http::status>(r.status), req.version()};
      add_common_headers(res);
      if (r.status != 204) {
        res.set(http::field::content_type, "application/json; charset=utf-8");
        res.body() = dump_json(r.body);
      }
      res.keep_alive(req.keep_alive());
      res.prepare_payload();
      http::write(socket, res);
      if (!res.keep_alive()) break;
    }
  } catch (const std::exception&) {
    // Client went away or sent garbage.
  }
}

}  // namespace

void HttpServer::start() {
  Impl& im = *impl_;
  boost::system::error_code ec;
  const auto address = asio::ip::make_address(opts_.host, ec);
  if (ec) throw std::runtime_error("invalid http host '" + opts_.host + "'");
  const tcp::endpoint ep(address, static_cast<unsigned short>(opts_.port));
  im.acceptor.open(ep.protocol(), ec);
  if (!ec) im.acceptor.set_option(asio::socket_base::reuse_address(true), ec);
  if (!ec) im.acceptor.bind(ep, ec);
  if (!ec) im.acceptor.listen(asio::socket_base::max_listen_connections, ec);
  if (ec) {
    throw std::runtime_error("cannot listen on " + opts_.host + ":" + std::to_string(opts_.port) +
                             ": " + ec.message());
  }
  port_ = im.acceptor.local_endpoint().port();
  im.running = true;

  im.accept_thread = std::thread([this] {
    Impl& im = *impl_;
    while (im.running) {
      pollfd pfd{im.acceptor.native_handle(), POLLIN, 0};
      if (::poll(&pfd, 1, 50) <= 0) continue;
      auto conn = std::make_shared<Impl::Conn>(im.ioc);
      boost::system::error_code aec;
      im.acceptor.accept(conn->socket, aec);
      if (aec) continue;
      std::lock_guard lock(im.conns_mutex);
      std::erase_if(im.conns, [](const std::shared_ptr<Impl::Conn>& c) {
        if (!c->done) return false;
        if (c->thread.joinable()) c->thread.join();
        return true;
      });
      conn->thread = std::thread([this, conn] {
        serve_connection(session_, conn->socket, opts_.event_queue, impl_->running);
        // The descriptor stays open until the Conn is destroyed, so stop()
        // never shuts down a reused fd.
        ::shutdown(conn->socket.native_handle(), SHUT_RDWR);
        conn->done = true;
      });
      im.conns.push_back(std::move(conn));
    }
  });
}

void HttpServer::stop() {
  Impl& im = *impl_;
  if (!im.running.exchange(false)) return;
  if (im.accept_thread.joinable()) im.accept_thread.join();
  boost::system::error_code ec;
  im.acceptor.close(ec);
  std::vector<std::shared_ptr<Impl::Conn>> conns;
  {
    std::lock_guard lock(im.conns_mutex);
    conns.swap(im.conns);
  }
  for (auto& c : conns) {
    if (!c->done) ::shutdown(c->socket.native_handle(), SHUT_RDWR);
    if (c->thread.joinable()) c->thread.join();
  }
}

}  // namespace pointspeak::service
