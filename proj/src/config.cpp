#include <nhd/config.hpp>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>

namespace nhd
{
	namespace
	{
		std::string trim(const std::string &s)
		{
			const auto first = s.find_first_not_of(" \t\r");
			if (first == std::string::npos)
				return {};
			const auto last = s.find_last_not_of(" \t\r");
			return s.substr(first, last - first + 1);
		}
	} // namespace

	Config Config::parse(std::istream &in, const std::string &source)
	{
		Config c;
		c.source_ = source;
		std::string raw;
		int line = 0;
		while (std::getline(in, raw))
		{
			++line;
			const std::string text = trim(raw.substr(0, raw.find('#')));
			if (text.empty())
				continue;
			const auto eq = text.find('=');
			if (eq == std::string::npos)
				throw ConfigError(source + ":" + std::to_string(line) + ": expected key = value, got '" + text + "'");
			ConfigEntry e{trim(text.substr(0, eq)), trim(text.substr(eq + 1)), line};
			if (e.key.empty())
				throw ConfigError(source + ":" + std::to_string(line) + ": missing key before '='");
			auto same = std::find_if(c.entries_.begin(), c.entries_.end(), [&](const auto &o) { return o.key == e.key; });
			if (same != c.entries_.end())
				*same = e;
			else
				c.entries_.push_back(e);
		}
		return c;
	}

	Config Config::load(const std::filesystem::path &path)
	{
		std::ifstream in(path);
		if (!in)
			throw ConfigError("cannot open config file " + path.string());
		return parse(in, path.string());
	}

	void Config::fail(const ConfigEntry &e, const std::string &message) const
	{
		throw ConfigError(source_ + ":" + std::to_string(e.line) + ": key '" + e.key + "': " + message);
	}

	double Config::as_double(const ConfigEntry &e) const
	{
		double v = 0;
		const char *end = e.value.data() + e.value.size();
		const auto [ptr, ec] = std::from_chars(e.value.data(), end, v);
		if (ec != std::errc() || ptr != end)
			fail(e, "expected a number, got '" + e.value + "'");
		return v;
	}

	int Config::as_int(const ConfigEntry &e) const
	{
		int v = 0;
		const char *end = e.value.data() + e.value.size();
		const auto [ptr, ec] = std::from_chars(e.value.data(), end, v);
		if (ec != std::errc() || ptr != end)
			fail(e, "expected an integer, got '" + e.value + "'");
		return v;
	}

	bool Config::as_bool(const ConfigEntry &e) const
	{
		if (e.value == "true" || e.value == "1" || e.value == "yes" || e.value == "on")
			return true;
		if (e.value == "false" || e.value == "0" || e.value == "no" || e.value == "off")
			return false;
		fail(e, "expected true or false, got '" + e.value + "'");
	}
} // namespace nhd
