#pragma once

/// \file event.hpp
/// \brief Event expressions: statements combined with NOT, AND, OR and
/// causal precedence.

#include "ptree/tree.hpp"

#include <memory>
#include <variant>

namespace ptree {

class Event;

namespace event {

struct Atom {
    Statement statement;
};
struct Not {
    std::shared_ptr<const Event> operand;
};
struct And {
    std::shared_ptr<const Event> lhs, rhs;
};
struct Or {
    std::shared_ptr<const Event> lhs, rhs;
};
/// `cause ~> effect`: the cause resolves true strictly before the effect
/// resolves at all, and the effect then resolves true.
struct Prec {
    std::shared_ptr<const Event> cause, effect;
};

}  // namespace event

/// Immutable event expression tree. Copies share structure.
class Event {
public:
    using Variant = std::variant<event::Atom, event::Not, event::And, event::Or, event::Prec>;

    explicit Event(Variant v) : v_(std::move(v)) {}

    static Event atom(Statement s) { return Event(event::Atom{std::move(s)}); }
    static Event atom(std::string variable, Value value) {
        return atom(Statement{std::move(variable), std::move(value)});
    }
    static Event negate(Event e) { return Event(event::Not{share(std::move(e))}); }
    static Event conj(Event a, Event b) { return Event(event::And{share(std::move(a)), share(std::move(b))}); }
    static Event disj(Event a, Event b) { return Event(event::Or{share(std::move(a)), share(std::move(b))}); }
    static Event prec(Event cause, Event effect) {
        return Event(event::Prec{share(std::move(cause)), share(std::move(effect))});
    }

    const Variant& variant() const { return v_; }

    template <class T>
    const T* as() const { return std::get_if<T>(&v_); }

    friend bool operator==(const Event& a, const Event& b);

private:
    static std::shared_ptr<const Event> share(Event e) { return std::make_shared<const Event>(std::move(e)); }

    Variant v_;
};

inline bool operator==(const Event& a, const Event& b) {
    if (a.v_.index() != b.v_.index()) return false;
    return std::visit(
        [&](const auto& x) -> bool {
            using T = std::decay_t<decltype(x)>;
            const T& y = std::get<T>(b.v_);
            if constexpr (std::is_same_v<T, event::Atom>) return x.statement == y.statement;
            else if constexpr (std::is_same_v<T, event::Not>) return *x.operand == *y.operand;
            else if constexpr (std::is_same_v<T, event::Prec>)
                return *x.cause == *y.cause && *x.effect == *y.effect;
            else return *x.lhs == *y.lhs && *x.rhs == *y.rhs;
        },
        a.v_);
}

}  // namespace ptree
