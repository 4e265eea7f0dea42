#pragma once

#include "types.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace nhd
{
	struct ConfigError : Error
	{
		using Error::Error;
	};

	struct ConfigEntry
	{
		std::string key;
		std::string value;
		int line = 0;
	};

	/// Plain key = value lines. '#' starts a comment; blank lines are ignored;
	/// a repeated key keeps its last value. Every error names the source and line.
	class Config
	{
	public:
		static Config parse(std::istream &in, const std::string &source = "<config>");
		static Config load(const std::filesystem::path &path);

		const std::vector<ConfigEntry> &entries() const { return entries_; }
		const std::string &source() const { return source_; }

		double as_double(const ConfigEntry &e) const;
		int as_int(const ConfigEntry &e) const;
		bool as_bool(const ConfigEntry &e) const;

		[[noreturn]] void fail(const ConfigEntry &e, const std::string &message) const;

	private:
		std::string source_;
		std::vector<ConfigEntry> entries_;
	};
} // namespace nhd
