#pragma once

#include <memory>
#include <string>
#include <vector>

#include "hj/expr.hpp"

namespace hj {

enum class ChartKind { Generic, DarbouxContact, DarbouxSymplectic, LcsLocal };

/// Coordinate chart. Darboux-type kinds fix the order (q^1..q^n, p_1..p_n[, z]).
struct Chart {
  std::string name;
  std::vector<std::string> coords;
  ChartKind kind = ChartKind::Generic;
  int n = 0;

  int dim() const { return static_cast<int>(coords.size()); }
  int index_of(const std::string& id) const;
  Expr coord(int i) const;
  Expr coord(const std::string& id) const;

  int q(int i) const { return i; }
  int p(int i) const { return n + i; }
  int z() const { return 2 * n; }
  bool darboux() const { return kind != ChartKind::Generic; }

  friend bool operator==(const Chart& a, const Chart& b) {
    return a.name == b.name && a.coords == b.coords && a.kind == b.kind && a.n == b.n;
  }
};

using ChartPtr = std::shared_ptr<const Chart>;

/// Validating constructor; throws std::invalid_argument.
ChartPtr make_chart(std::string name, std::vector<std::string> coords, ChartKind kind = ChartKind::Generic,
                    int n = 0);
ChartPtr darboux_contact_chart(int n, std::string name = "C");
ChartPtr darboux_symplectic_chart(int n, std::string name = "S");
ChartPtr lcs_chart(int n, std::string name = "L");
/// Chart with one extra trailing coordinate (used by Poissonization).
ChartPtr extend_chart(const Chart& base, const std::string& coord);

std::string kind_name(ChartKind k);
bool same_chart(const ChartPtr& a, const ChartPtr& b);

class ChartMismatch : public std::invalid_argument {
public:
  ChartMismatch() : std::invalid_argument("chart mismatch") {}
};

inline void require_same(const ChartPtr& a, const ChartPtr& b) {
  if (!same_chart(a, b)) throw ChartMismatch();
}

} // namespace hj
