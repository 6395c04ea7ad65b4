#ifndef REGCEP_EVENTS_HPP
#define REGCEP_EVENTS_HPP

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "regcep/scalar.hpp"

namespace regcep {

struct Attribute {
    std::string name;
    Kind kind;
    bool operator==(const Attribute&) const = default;
};

// Ordered attribute list. Every schema carries a "type" attribute of kind
// symbol that holds the event's relation name.
class Schema {
public:
    explicit Schema(std::vector<Attribute> attributes);

    const std::vector<Attribute>& attributes() const { return attrs_; }
    std::optional<std::size_t> index_of(std::string_view name) const;
    std::string header() const;

    bool operator==(const Schema& other) const { return attrs_ == other.attrs_; }

private:
    std::vector<Attribute> attrs_;
    std::map<std::string, std::size_t, std::less<>> by_name_;
};

using SchemaPtr = std::shared_ptr<const Schema>;

// One tuple of the stream. Values are stored in schema order.
class Event {
public:
    Event(SchemaPtr schema, std::vector<Scalar> values);

    const Scalar& at(std::string_view attribute) const; // throws EvaluationError when absent
    const std::vector<Scalar>& values() const { return values_; }
    const SchemaPtr& schema() const { return schema_; }
    std::string csv() const;

    // Value-based; events in one run share a schema.
    bool operator==(const Event& other) const { return values_ == other.values_; }
    bool operator<(const Event& other) const { return values_ < other.values_; }

private:
    SchemaPtr schema_;
    std::vector<Scalar> values_;
};

// Ordered event sequence; the position of an event is its index.
class Stream {
public:
    Stream(SchemaPtr schema, std::vector<Event> events);

    std::size_t size() const { return events_.size(); }
    const Event& operator[](std::size_t i) const { return events_[i]; }
    const std::vector<Event>& events() const { return events_; }
    const SchemaPtr& schema() const { return schema_; }

    Stream prefix(std::size_t n) const;
    std::string serialize() const;

    bool operator==(const Stream& other) const;

private:
    SchemaPtr schema_;
    std::vector<Event> events_;
};

// "name:kind" entries separated by commas; must declare type:symbol.
Schema parse_schema(std::string_view header_line);

// Body rows only, one comma-separated line per event. '#' lines and blank
// lines are ignored. Row r becomes index r.
Stream load_stream(std::string_view body, SchemaPtr schema);

// Whole file: first non-comment line is the schema header.
Stream load_stream_file(std::string_view text);

} // namespace regcep

#endif
