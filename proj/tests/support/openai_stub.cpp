#include "openai_stub.hpp"

#include <thread>

#include "httplib.h"

namespace emocap::fx {

struct OpenAiStub::Impl {
  httplib::Server server;
  std::thread thread;
  int port = 0;
  Handler handler;
  mutable std::mutex mutex;
  std::vector<nlohmann::json> bodies;
  std::vector<std::string> auth;
};

OpenAiStub::OpenAiStub(Handler handler) : impl_(std::make_unique<Impl>()) {
  impl_->handler = std::move(handler);
  impl_->server.Post("/v1/completions", [this](const httplib::Request& req, httplib::Response& res) {
    nlohmann::json body = nlohmann::json::parse(req.body, nullptr, false);
    int count = 0;
    {
      std::lock_guard lock(impl_->mutex);
      count = static_cast<int>(impl_->bodies.size());
      impl_->bodies.push_back(body);
      impl_->auth.push_back(req.get_header_value("Authorization"));
    }
    const Reply reply = impl_->handler(body, count);
    res.status = reply.status;
    res.set_content(reply.body, "application/json");
  });
  impl_->port = impl_->server.bind_to_any_port("127.0.0.1");
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
}

OpenAiStub::~OpenAiStub() {
  impl_->server.stop();
  impl_->thread.join();
}

std::string OpenAiStub::endpoint() const {
  return "http://127.0.0.1:" + std::to_string(impl_->port) + "/v1";
}

int OpenAiStub::requests() const {
  std::lock_guard lock(impl_->mutex);
  return static_cast<int>(impl_->bodies.size());
}

std::vector<nlohmann::json> OpenAiStub::bodies() const {
  std::lock_guard lock(impl_->mutex);
  return impl_->bodies;
}

std::vector<std::string> OpenAiStub::auth_headers() const {
  std::lock_guard lock(impl_->mutex);
  return impl_->auth;
}

OpenAiStub::Reply OpenAiStub::text(const std::string& text) {
  return {200, nlohmann::json{{"choices", {{{"text", text}, {"index", 0}}}}}.dump()};
}

}  // namespace emocap::fx
