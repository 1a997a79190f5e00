#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

inline std::string read_fixture(const std::string& name) {
    std::ifstream in(std::string(PAVSIM_EXPERIMENTS_DIR) + "/" + name, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read fixture " + name);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::string fixture_path(const std::string& name) { return std::string(PAVSIM_EXPERIMENTS_DIR) + "/" + name; }
