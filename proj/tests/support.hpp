#pragma once

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>

namespace testsupport {

// Twelve randomized impressions over items 101/202/303 and two display ranks.
// Rank 1: 4 rows, 3 clicks (rate 3/4).  Rank 2: 8 rows, 3 clicks (rate 3/8).
// Item click rates 101: 4/4, 202: 2/4, 303: 0/4; constant prices 500/200/100.
inline const char* kImpressionFixture =
    "prop_id,position,click_bool,random_bool,price_usd\n"
    "101,1,1,1,500\n"
    "101,1,1,1,500\n"
    "101,2,1,1,500\n"
    "101,2,1,1,500\n"
    "202,1,1,1,200\n"
    "202,1,0,1,200\n"
    "202,2,1,1,200\n"
    "202,2,0,1,200\n"
    "303,2,0,1,100\n"
    "303,2,0,1,100\n"
    "303,2,0,1,100\n"
    "303,2,0,1,100\n";

inline std::string write_temp_file(const std::string& name, const std::string& content) {
  const std::string path = "/tmp/" + name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << content;
  out.close();
  return path;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return text;
}

}  // namespace testsupport
