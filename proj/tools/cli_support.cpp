#include "cli_support.hpp"

#include <charconv>
#include <fstream>
#include <stdexcept>

#ifndef LENDFAIR_VERSION
#    define LENDFAIR_VERSION "0.0.0"
#endif

namespace lendfair::cli {

std::string round_trip(double x)
{
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    if (ec != std::errc{})
        throw std::runtime_error("cannot format number");
    return std::string(buf, ptr);
}

CLI::Option* ParamSet::add(std::string const& name, double& v, std::string const& desc)
{
    printers_.emplace_back(name, [&v] { return round_trip(v); });
    return app_->add_option("--" + name, v, desc)->capture_default_str();
}

CLI::Option* ParamSet::add(std::string const& name, std::string& v, std::string const& desc)
{
    printers_.emplace_back(name, [&v] { return v; });
    return app_->add_option("--" + name, v, desc)->capture_default_str();
}

CLI::Option* ParamSet::add(std::string const& name, std::vector<double>& v,
                           std::string const& desc)
{
    printers_.emplace_back(name, [&v] {
        std::string out;
        for (std::size_t i = 0; i < v.size(); ++i)
            out += (i ? "," : "") + round_trip(v[i]);
        return out;
    });
    return app_->add_option("--" + name, v, desc)->delimiter(',');
}

CLI::Option* ParamSet::add(std::string const& name, std::optional<double>& v,
                           std::string const& desc)
{
    printers_.emplace_back(name, [&v] { return v ? round_trip(*v) : std::string{}; });
    return app_->add_option("--" + name, v, desc);
}

CLI::Option* ParamSet::flag(std::string const& name, bool& v, std::string const& desc)
{
    printers_.emplace_back(name, [&v] { return std::string{v ? "true" : "false"}; });
    return app_->add_flag("--" + name, v, desc);
}

std::vector<std::pair<std::string, std::string>> ParamSet::resolved() const
{
    std::vector<std::pair<std::string, std::string>> out;
    for (auto const& [name, print] : printers_)
    {
        std::string value = print();
        // unset optionals and empty lists are left to their defaults
        if (!value.empty())
            out.emplace_back(name, std::move(value));
    }
    return out;
}

namespace {

std::string trim(std::string const& s)
{
    auto const b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return {};
    auto const e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

std::map<std::string, std::string> read_config(std::filesystem::path const& file)
{
    std::ifstream in{file};
    if (!in)
        throw CLI::ValidationError("--config", "cannot open config file " + file.string());
    std::map<std::string, std::string> out;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line))
    {
        ++line_no;
        std::string const t = trim(line);
        if (t.empty() || t.front() == '#')
            continue;
        auto const eq = t.find('=');
        if (eq == std::string::npos)
            throw CLI::ValidationError("--config", file.string() + ":" + std::to_string(line_no)
                                                      + ": expected key=value");
        std::string key = trim(t.substr(0, eq));
        std::string value = trim(t.substr(eq + 1));
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
            value = value.substr(1, value.size() - 2);
        out[key] = value;
    }
    return out;
}

std::vector<std::string> merge_config(std::vector<std::string> args,
                                      std::vector<std::string> const& subcommands)
{
    std::string config_file;
    for (std::size_t i = 0; i < args.size(); ++i)
    {
        if (args[i] == "--config")
        {
            if (i + 1 >= args.size())
                throw CLI::ArgumentMismatch("--config needs a file name");
            config_file = args[i + 1];
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i),
                       args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
            break;
        }
        if (args[i].rfind("--config=", 0) == 0)
        {
            config_file = args[i].substr(9);
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
            break;
        }
    }
    if (config_file.empty())
        return args;

    auto entries = read_config(config_file);
    bool has_command = false;
    for (auto const& a : args)
    {
        for (auto const& s : subcommands)
            has_command = has_command || a == s;
    }
    if (auto it = entries.find("command"); it != entries.end())
    {
        if (!has_command)
            args.insert(args.begin(), it->second);
        entries.erase(it);
    }
    for (auto const& [key, value] : entries)
    {
        std::string const flag = "--" + key;
        bool given = false;
        for (auto const& a : args)
            given = given || a == flag || a.rfind(flag + "=", 0) == 0;
        if (!given)
            args.push_back(flag + "=" + value);
    }
    return args;
}

std::filesystem::path manifest_path_for(std::filesystem::path const& output)
{
    std::filesystem::path p = output;
    p.replace_extension(".manifest");
    return p;
}

void write_manifest(std::filesystem::path const& file, Manifest const& manifest)
{
    std::ofstream out{file};
    if (!out)
        throw std::runtime_error("cannot open " + file.string() + " for writing");
    out << "# lendfair run manifest; replay with: lendfair --config " << file.filename().string()
        << "\n";
    out << "# tool_version=" << LENDFAIR_VERSION << "\n";
    out << "# wall_clock_seconds=" << round_trip(manifest.wall_clock_seconds) << "\n";
    out << "command=" << manifest.command << "\n";
    for (auto const& [key, value] : manifest.params)
        out << key << "=" << value << "\n";
}

}  // namespace lendfair::cli
