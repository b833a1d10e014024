#include <cstdio>

#include "pathtrace/lifecycle.hpp"

namespace pathtrace {

SessionStore::SessionStore() : rng_(std::random_device{}()) {}

std::string SessionStore::create(ModelBag seed) {
  std::lock_guard lock(mutex_);
  std::string id;
  do {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(rng_()));
    id = buf;
  } while (!issued_.insert(id).second);
  sessions_[id] = Session{{}, std::move(seed), std::chrono::system_clock::now()};
  return id;
}

bool SessionStore::contains(const std::string& session_id) const {
  std::lock_guard lock(mutex_);
  return sessions_.contains(session_id);
}

void SessionStore::save(const std::string& session_id, const View& view, const std::string& request_id) {
  std::lock_guard lock(mutex_);
  auto it = sessions_.find(session_id);
  if (it == sessions_.end()) throw std::out_of_range("unknown session " + session_id);
  it->second.views[view.view_id] = ViewState{view.view_id, view, request_id};
}

std::optional<ViewState> SessionStore::state(const std::string& session_id, const std::string& view_id) const {
  std::lock_guard lock(mutex_);
  auto it = sessions_.find(session_id);
  if (it == sessions_.end()) return std::nullopt;
  auto v = it->second.views.find(view_id);
  if (v == it->second.views.end()) return std::nullopt;
  return v->second;
}

std::optional<View> SessionStore::restore(const std::string& session_id, const std::string& view_id) const {
  auto s = state(session_id, view_id);
  if (!s) return std::nullopt;
  return std::move(s->tree);
}

ModelBag SessionStore::model(const std::string& session_id) const {
  std::lock_guard lock(mutex_);
  auto it = sessions_.find(session_id);
  return it == sessions_.end() ? ModelBag{} : it->second.model;
}

void SessionStore::set_model(const std::string& session_id, ModelBag model) {
  std::lock_guard lock(mutex_);
  auto it = sessions_.find(session_id);
  if (it != sessions_.end()) it->second.model = std::move(model);
}

std::size_t SessionStore::size() const {
  std::lock_guard lock(mutex_);
  return sessions_.size();
}

std::optional<View> restore_view(const SessionStore& store, const std::string& session_id, const std::string& view_id) {
  return store.restore(session_id, view_id);
}

}  // namespace pathtrace
