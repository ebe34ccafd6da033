#pragma once

// A top-degree multi-vector field on a model domain, represented as the
// reference dual volume rescaled by a scalar: the field is f * (1/mu).

#include <string>
#include <string_view>

#include "nambu/expr.hpp"
#include "nambu/geometry.hpp"

namespace nambu {

struct NambuField {
  Domain domain;
  Expression f;
};

inline NambuField make_field(DomainKind kind, std::string_view f_text) {
  return NambuField{Domain{kind}, parse(f_text, kind)};
}

inline double field_value(const NambuField& fld, const Vec3& p) {
  return eval_value(fld.f, std::span<const double>(p.data(), fld.domain.ambient_dim()));
}

inline ValueGrad field_value_grad(const NambuField& fld, const Vec3& p) {
  return eval_with_gradient(fld.f, std::span<const double>(p.data(), fld.domain.ambient_dim()));
}

}  // namespace nambu
