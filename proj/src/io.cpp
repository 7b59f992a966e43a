#include "hodge/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

#include "hodge/errors.hpp"

namespace hodge {

std::string read_text(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_text_atomic(const std::filesystem::path& path, const std::string& contents)
{
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw InputError("cannot open " + tmp.string() + " for writing");
        out << contents;
        out.flush();
        if (!out) throw InputError("write failed: " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw InputError("cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

std::string format_double(double value)
{
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc()) throw std::runtime_error("format_double failed");
    return std::string(buf, end);
}

double parse_double(const std::string& field, const std::string& context)
{
    std::size_t begin = field.find_first_not_of(" \t\r");
    std::size_t last = field.find_last_not_of(" \t\r");
    if (begin == std::string::npos) throw InputError(context + ": empty field");
    const char* first = field.data() + begin;
    const char* stop = field.data() + last + 1;
    if (*first == '+') ++first;
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(first, stop, value);
    if (ec != std::errc() || ptr != stop) throw InputError(context + ": cannot parse '" + field + "' as a number");
    return value;
}

}  // namespace hodge
