#pragma once

#include <string>

#include "gf/mollifier.hpp"
#include "gf/representative.hpp"

namespace gf {

/// Parses a scalar net built from embeddings, e.g.
///   "iota(delta)", "x * iota(delta)", "iota(heaviside)^2 - iota(heaviside)",
///   "sigma((sin x0)) - iota(smooth((sin x0)))", "0.5 * eps".
/// Grammar (infix, left associative):
///   net    := term (('+'|'-') term)*
///   term   := factor ('*' factor)*
///   factor := primary ('^' INT)?
///   primary:= NUMBER | 'eps' | 'x' | 'iota(' DISTRIBUTION ')'
///            | 'sigma(' EXPR ')' | '(' net ')'
/// where DISTRIBUTION is the distribution grammar and EXPR the prefix
/// expression grammar.
Representative parseNet(const std::string& text, const Mollifier& rho,
                        const ChartDomain& domain);

}  // namespace gf
