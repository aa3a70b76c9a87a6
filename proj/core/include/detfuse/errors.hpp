#ifndef DETFUSE_ERRORS_HPP
#define DETFUSE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace detfuse {

// Invalid combination of otherwise well-formed settings (receiver vs
// allocation strategy, unsupported case preset, nonzero training power
// where a rule forbids it).
class config_error : public std::runtime_error {
public:
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

// Textual config that cannot be parsed.  Carries the offending key and
// 1-based line number when known (line 0 means "whole file").
class parse_error : public config_error {
public:
    parse_error(const std::string& what, std::string key, int line)
        : config_error(what), key_(std::move(key)), line_(line) {}

    const std::string& key() const noexcept { return key_; }
    int line() const noexcept { return line_; }

private:
    std::string key_;
    int line_;
};

} // namespace detfuse

#endif
