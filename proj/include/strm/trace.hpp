#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "strm/diag.hpp"
#include "strm/interp.hpp"
#include "strm/printer.hpp"
#include "strm/rational.hpp"
#include "strm/spec.hpp"
#include "strm/value.hpp"

namespace strm {

// A trace is a sequence of events; on disk it is line-delimited JSON, one
// record per line: {"time": "<decimal seconds>", "<input>": <value>, ...}
// with tuple values as arrays. Times are non-decreasing and every record
// covers at least one input.
using TraceFile = std::vector<Event>;

namespace detail {

inline Value json_to_value(const nlohmann::ordered_json& j, const ValueType& want,
                           const std::string& where, std::size_t line) {
    auto fail = [&](const std::string& got) -> Value {
        throw SpecError("trace line " + std::to_string(line) + ": " + where + " expects " +
                        want.str() + ", got " + got);
    };
    switch (want.kind) {
        case ValueType::Kind::Bool:
            if (j.is_boolean()) return Value(j.get<bool>());
            return fail(std::string(j.type_name()));
        case ValueType::Kind::Int64:
            if (j.is_number_unsigned()) {
                std::uint64_t u = j.get<std::uint64_t>();
                if (u > static_cast<std::uint64_t>(INT64_MAX)) return fail("out-of-range integer");
                return Value(static_cast<std::int64_t>(u));
            }
            if (j.is_number_integer()) return Value(j.get<std::int64_t>());
            return fail(std::string(j.type_name()));
        case ValueType::Kind::Float64:
            // Integer-looking JSON numbers are accepted for Float64 inputs.
            if (j.is_number_float()) return Value(j.get<double>());
            if (j.is_number_unsigned()) return Value(static_cast<double>(j.get<std::uint64_t>()));
            if (j.is_number_integer()) return Value(static_cast<double>(j.get<std::int64_t>()));
            return fail(std::string(j.type_name()));
        case ValueType::Kind::Tuple: {
            if (!j.is_array()) return fail(std::string(j.type_name()));
            if (j.size() != want.elems.size())
                return fail("array of length " + std::to_string(j.size()));
            std::vector<Value> elems;
            elems.reserve(j.size());
            for (std::size_t i = 0; i < j.size(); ++i)
                elems.push_back(json_to_value(j[i], want.elems[i],
                                              where + " element " + std::to_string(i), line));
            return Value(std::move(elems));
        }
    }
    return fail("unsupported value");
}

inline void value_to_json_text(const Value& v, std::string& out) {
    if (v.is_bool()) {
        out += v.as_bool() ? "true" : "false";
    } else if (v.is_int()) {
        out += std::to_string(v.as_int());
    } else if (v.is_float()) {
        double d = v.as_float();
        if (!std::isfinite(d)) throw SpecError("trace values must be finite");
        out += float_str(d);
    } else {
        out += '[';
        const auto& elems = v.as_tuple();
        for (std::size_t i = 0; i < elems.size(); ++i) {
            if (i) out += ", ";
            value_to_json_text(elems[i], out);
        }
        out += ']';
    }
}

}  // namespace detail

inline TraceFile parse_trace(const std::string& text, const std::vector<InputDecl>& inputs) {
    std::map<std::string, const ValueType*> types;
    for (const auto& in : inputs) types.emplace(in.name, &in.type);

    TraceFile trace;
    std::size_t line_no = 0;
    std::size_t start = 0;
    bool have_prev = false;
    Rational prev;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string::npos) end = text.size();
        std::string line = text.substr(start, end - start);
        start = end + 1;
        ++line_no;
        if (line.empty()) continue;

        nlohmann::ordered_json j;
        try {
            j = nlohmann::ordered_json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw SpecError("trace line " + std::to_string(line_no) + ": " + e.what());
        }
        if (!j.is_object())
            throw SpecError("trace line " + std::to_string(line_no) + ": record must be an object");

        Event ev;
        bool have_time = false;
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (it.key() == "time") {
                if (!it.value().is_string())
                    throw SpecError("trace line " + std::to_string(line_no) +
                                    ": \"time\" must be a decimal string");
                if (!Rational::parse_decimal(it.value().get<std::string>(), ev.time) ||
                    ev.time < Rational(0))
                    throw SpecError("trace line " + std::to_string(line_no) +
                                    ": bad timestamp '" + it.value().get<std::string>() + "'");
                have_time = true;
                continue;
            }
            auto ti = types.find(it.key());
            if (ti == types.end())
                throw SpecError("trace line " + std::to_string(line_no) + ": unknown input '" +
                                it.key() + "'");
            ev.values.emplace_back(
                it.key(), detail::json_to_value(it.value(), *ti->second,
                                                "input '" + it.key() + "'", line_no));
        }
        if (!have_time)
            throw SpecError("trace line " + std::to_string(line_no) + ": missing \"time\"");
        if (ev.values.empty())
            throw SpecError("trace line " + std::to_string(line_no) + ": record covers no input");
        if (have_prev && ev.time < prev)
            throw SpecError("trace line " + std::to_string(line_no) + ": timestamps decrease");
        prev = ev.time;
        have_prev = true;
        trace.push_back(std::move(ev));
    }
    return trace;
}

// Emits the canonical on-disk form: the generator's output round-trips
// byte-identically through parse_trace + emit_trace.
inline std::string emit_trace(const TraceFile& trace) {
    std::string out;
    for (const auto& ev : trace) {
        if (!ev.time.decimal_exact())
            throw SpecError("trace time " + ev.time.str() + " has no finite decimal form");
        out += "{\"time\": \"" + ev.time.str() + "\"";
        for (const auto& [name, value] : ev.values) {
            out += ", \"" + name + "\": ";
            detail::value_to_json_text(value, out);
        }
        out += "}\n";
    }
    return out;
}

// ---------------------------------------------------------------------------
// Deterministic trace generator. Inputs sharing a period land in one joint
// record at every multiple of that period in (0, duration]. Value draws are
// hand-rolled on top of mt19937_64 so identical seeds give identical traces
// on every platform.

struct InputProfile {
    Rational period{1, 10};  // seconds between readings, > 0
    double lo = 0.0;         // numeric range (elementwise for tuples)
    double hi = 100.0;
    double bias = 0.5;       // probability of `true` for Bool inputs
};

struct TraceGenConfig {
    Rational duration;  // records at t in (0, duration]
    std::uint64_t seed = 1;
    std::vector<std::pair<std::string, InputProfile>> profiles;  // one per input
};

namespace detail {

inline double unit_draw(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;  // [0, 1)
}

inline Value draw_value(std::mt19937_64& rng, const ValueType& type, const InputProfile& p) {
    switch (type.kind) {
        case ValueType::Kind::Bool: return Value(unit_draw(rng) < p.bias);
        case ValueType::Kind::Float64: return Value(p.lo + unit_draw(rng) * (p.hi - p.lo));
        case ValueType::Kind::Int64: {
            double lo = std::ceil(p.lo);
            double hi = std::floor(p.hi);
            if (lo > hi) throw SpecError("empty integer range for trace generation");
            auto span = static_cast<std::uint64_t>(hi - lo) + 1;
            auto off = static_cast<std::uint64_t>(unit_draw(rng) * static_cast<double>(span));
            if (off >= span) off = span - 1;
            return Value(static_cast<std::int64_t>(lo) + static_cast<std::int64_t>(off));
        }
        case ValueType::Kind::Tuple: {
            std::vector<Value> elems;
            elems.reserve(type.elems.size());
            for (const auto& et : type.elems) elems.push_back(draw_value(rng, et, p));
            return Value(std::move(elems));
        }
    }
    throw SpecError("unsupported input type for trace generation");
}

}  // namespace detail

inline TraceFile generate_trace(const std::vector<InputDecl>& inputs, const TraceGenConfig& cfg) {
    std::map<std::string, std::size_t> decl_index;
    for (std::size_t i = 0; i < inputs.size(); ++i) decl_index.emplace(inputs[i].name, i);

    std::vector<const InputProfile*> profile_of(inputs.size(), nullptr);
    for (const auto& [name, profile] : cfg.profiles) {
        auto it = decl_index.find(name);
        if (it == decl_index.end()) throw SpecError("unknown input '" + name + "' in trace profile");
        if (profile_of[it->second]) throw SpecError("duplicate trace profile for input '" + name + "'");
        if (!profile.period.is_positive())
            throw SpecError("non-positive period for input '" + name + "'");
        profile_of[it->second] = &profile;
    }
    for (std::size_t i = 0; i < inputs.size(); ++i)
        if (!profile_of[i])
            throw SpecError("no trace profile for input '" + inputs[i].name + "'");

    // All record instants, with the inputs due at each.
    std::map<Rational, std::vector<std::size_t>> due;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        const Rational& period = profile_of[i]->period;
        for (Rational t = period; t <= cfg.duration; t = t + period) due[t].push_back(i);
    }

    std::mt19937_64 rng(cfg.seed);
    TraceFile trace;
    trace.reserve(due.size());
    for (auto& [time, indices] : due) {
        std::sort(indices.begin(), indices.end());
        Event ev;
        ev.time = time;
        for (std::size_t i : indices)
            ev.values.emplace_back(inputs[i].name,
                                   detail::draw_value(rng, inputs[i].type, *profile_of[i]));
        trace.push_back(std::move(ev));
    }
    return trace;
}

}  // namespace strm
