#pragma once

#include "hjm/symexpr.hpp"

namespace hjm::detail {

Expr canonical_pow(const Expr& b, const Num& e);
Expr canonical_add(const std::vector<Expr>& xs);
Expr canonical_mul(const std::vector<Expr>& xs);

}  // namespace hjm::detail
