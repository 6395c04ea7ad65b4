#include "regcep/events.hpp"

#include <charconv>

#include "regcep/errors.hpp"

namespace regcep {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= s.size(); ++i) {
        if (i == s.size() || s[i] == sep) {
            out.push_back(s.substr(start, i - start));
            start = i + 1;
        }
    }
    return out;
}

Scalar parse_value(std::string_view token, const Attribute& attr, std::size_t row) {
    const std::string where = "row " + std::to_string(row) + ", attribute '" + attr.name + "'";
    if (token.empty()) throw ParseError("empty value for " + where);
    switch (attr.kind) {
    case Kind::Symbol:
        return Scalar(std::string(token));
    case Kind::Integer: {
        std::int64_t v = 0;
        auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
        if (ec != std::errc() || ptr != token.data() + token.size())
            throw ParseError("unparsable integer '" + std::string(token) + "' for " + where);
        return Scalar(v);
    }
    default: {
        double v = 0;
        auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
        if (ec != std::errc() || ptr != token.data() + token.size())
            throw ParseError("unparsable real '" + std::string(token) + "' for " + where);
        return Scalar(v);
    }
    }
}

} // namespace

Schema::Schema(std::vector<Attribute> attributes) : attrs_(std::move(attributes)) {
    for (std::size_t i = 0; i < attrs_.size(); ++i) {
        if (attrs_[i].name.empty()) throw ParseError("empty attribute name in schema");
        if (!by_name_.emplace(attrs_[i].name, i).second)
            throw ParseError("duplicate attribute name '" + attrs_[i].name + "' in schema");
    }
    auto type = index_of("type");
    if (!type || attrs_[*type].kind != Kind::Symbol)
        throw ParseError("schema must declare a 'type' attribute of kind symbol");
}

std::optional<std::size_t> Schema::index_of(std::string_view name) const {
    auto it = by_name_.find(name);
    if (it == by_name_.end()) return std::nullopt;
    return it->second;
}

std::string Schema::header() const {
    std::string out;
    for (std::size_t i = 0; i < attrs_.size(); ++i) {
        if (i) out += ',';
        out += attrs_[i].name + ':' + kind_name(attrs_[i].kind);
    }
    return out;
}

Event::Event(SchemaPtr schema, std::vector<Scalar> values)
    : schema_(std::move(schema)), values_(std::move(values)) {
    const auto& attrs = schema_->attributes();
    if (values_.size() != attrs.size())
        throw ParseError("event has " + std::to_string(values_.size()) + " values, schema expects " +
                         std::to_string(attrs.size()));
    for (std::size_t i = 0; i < attrs.size(); ++i)
        if (kind_of(values_[i]) != attrs[i].kind)
            throw ParseError("value kind mismatch for attribute '" + attrs[i].name + "'");
}

const Scalar& Event::at(std::string_view attribute) const {
    auto idx = schema_->index_of(attribute);
    if (!idx) throw EvaluationError("missing attribute '" + std::string(attribute) + "'");
    return values_[*idx];
}

std::string Event::csv() const {
    std::string out;
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (i) out += ',';
        out += to_text(values_[i]);
    }
    return out;
}

Stream::Stream(SchemaPtr schema, std::vector<Event> events)
    : schema_(std::move(schema)), events_(std::move(events)) {}

Stream Stream::prefix(std::size_t n) const {
    std::vector<Event> sub(events_.begin(), events_.begin() + std::min(n, events_.size()));
    return Stream(schema_, std::move(sub));
}

std::string Stream::serialize() const {
    std::string out = schema_->header() + '\n';
    for (const auto& e : events_) out += e.csv() + '\n';
    return out;
}

bool Stream::operator==(const Stream& other) const {
    return *schema_ == *other.schema_ && events_ == other.events_;
}

Schema parse_schema(std::string_view header_line) {
    std::vector<Attribute> attrs;
    for (auto entry : split(trim(header_line), ',')) {
        entry = trim(entry);
        auto colon = entry.find(':');
        if (colon == std::string_view::npos)
            throw ParseError("schema entry '" + std::string(entry) + "' is not name:kind");
        auto name = trim(entry.substr(0, colon));
        auto kind = trim(entry.substr(colon + 1));
        Kind k;
        if (kind == "symbol") k = Kind::Symbol;
        else if (kind == "integer") k = Kind::Integer;
        else if (kind == "real") k = Kind::Real;
        else throw ParseError("unknown attribute kind '" + std::string(kind) + "'");
        attrs.push_back({std::string(name), k});
    }
    return Schema(std::move(attrs));
}

Stream load_stream(std::string_view body, SchemaPtr schema) {
    std::vector<Event> events;
    std::size_t row = 0;
    for (auto raw : split(body, '\n')) {
        auto line = trim(raw);
        if (line.empty() || line.front() == '#') continue;
        auto tokens = split(line, ',');
        if (tokens.size() != schema->attributes().size())
            throw ParseError("row " + std::to_string(row) + " has " + std::to_string(tokens.size()) +
                             " values, schema expects " + std::to_string(schema->attributes().size()));
        std::vector<Scalar> values;
        values.reserve(tokens.size());
        for (std::size_t i = 0; i < tokens.size(); ++i)
            values.push_back(parse_value(trim(tokens[i]), schema->attributes()[i], row));
        events.emplace_back(schema, std::move(values));
        ++row;
    }
    return Stream(std::move(schema), std::move(events));
}

Stream load_stream_file(std::string_view text) {
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        auto line = trim(text.substr(pos, eol - pos));
        if (!line.empty() && line.front() != '#') {
            auto schema = std::make_shared<const Schema>(parse_schema(line));
            return load_stream(text.substr(eol < text.size() ? eol + 1 : eol), schema);
        }
        pos = eol + 1;
    }
    throw ParseError("stream file has no schema header");
}

} // namespace regcep
