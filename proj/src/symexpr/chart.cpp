#include "hj/chart.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace hj {

int Chart::index_of(const std::string& id) const {
  auto it = std::find(coords.begin(), coords.end(), id);
  return it == coords.end() ? -1 : static_cast<int>(it - coords.begin());
}

Expr Chart::coord(int i) const {
  if (i < 0 || i >= dim()) throw std::out_of_range("coordinate index out of range");
  return Expr::coord(i, coords[static_cast<std::size_t>(i)]);
}

Expr Chart::coord(const std::string& id) const {
  int i = index_of(id);
  if (i < 0) throw std::invalid_argument("unknown coordinate " + id);
  return coord(i);
}

ChartPtr make_chart(std::string name, std::vector<std::string> coords, ChartKind kind, int n) {
  if (coords.empty()) throw std::invalid_argument("chart needs at least one coordinate");
  std::set<std::string> seen(coords.begin(), coords.end());
  if (seen.size() != coords.size()) throw std::invalid_argument("chart coordinates must be distinct");
  int dim = static_cast<int>(coords.size());
  switch (kind) {
  case ChartKind::Generic:
    n = 0;
    break;
  case ChartKind::DarbouxContact:
    if (n < 1 || dim != 2 * n + 1) throw std::invalid_argument("darboux-contact(n) needs 2n+1 coordinates");
    break;
  case ChartKind::DarbouxSymplectic:
  case ChartKind::LcsLocal:
    if (n < 1 || dim != 2 * n) throw std::invalid_argument(kind_name(kind) + "(n) needs 2n coordinates");
    break;
  }
  auto c = std::make_shared<Chart>();
  c->name = std::move(name);
  c->coords = std::move(coords);
  c->kind = kind;
  c->n = n;
  return c;
}

namespace {
std::vector<std::string> qp_names(int n) {
  std::vector<std::string> v;
  for (int i = 1; i <= n; ++i) v.push_back(n == 1 ? "q" : "q" + std::to_string(i));
  for (int i = 1; i <= n; ++i) v.push_back(n == 1 ? "p" : "p" + std::to_string(i));
  return v;
}
} // namespace

ChartPtr darboux_contact_chart(int n, std::string name) {
  auto v = qp_names(n);
  v.push_back("z");
  return make_chart(std::move(name), std::move(v), ChartKind::DarbouxContact, n);
}

ChartPtr darboux_symplectic_chart(int n, std::string name) {
  return make_chart(std::move(name), qp_names(n), ChartKind::DarbouxSymplectic, n);
}

ChartPtr lcs_chart(int n, std::string name) {
  return make_chart(std::move(name), qp_names(n), ChartKind::LcsLocal, n);
}

ChartPtr extend_chart(const Chart& base, const std::string& coord) {
  auto v = base.coords;
  v.push_back(coord);
  return make_chart(base.name + "_" + coord, std::move(v));
}

std::string kind_name(ChartKind k) {
  switch (k) {
  case ChartKind::Generic:
    return "generic";
  case ChartKind::DarbouxContact:
    return "darboux-contact";
  case ChartKind::DarbouxSymplectic:
    return "darboux-symplectic";
  case ChartKind::LcsLocal:
    return "lcs-local";
  }
  return "generic";
}

bool same_chart(const ChartPtr& a, const ChartPtr& b) { return a == b || (a && b && a->coords == b->coords); }

} // namespace hj
