#pragma once

#include <string>

#include "parvar/algebra/poly.hpp"
#include "parvar/model/model.hpp"

namespace parvar::testing {

inline std::string model_path(const std::string& name)
{
    return std::string(PARVAR_MODELS_DIR) + "/" + name;
}

inline Poly var(const RingPtr& ring, VarKind kind, int index, int order)
{
    return Poly::variable(ring, DiffVar{kind, static_cast<std::uint16_t>(index), static_cast<std::uint16_t>(order)});
}

inline Poly x(const RingPtr& ring, int index, int order = 0)
{
    return var(ring, VarKind::State, index, order);
}

inline Poly y(const RingPtr& ring, int order = 0)
{
    return var(ring, VarKind::Output, 0, order);
}

inline Poly u(const RingPtr& ring, int index, int order = 0)
{
    return var(ring, VarKind::Input, index, order);
}

inline Poly c(const RingPtr& ring, const ParamRat& value)
{
    return Poly::constant(ring, value);
}

} // namespace parvar::testing
