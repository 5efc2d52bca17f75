#pragma once

// Dataset files: header `y,x1,...,xp`, one observation per row, doubles
// serialized with the shortest round-trip representation.

#include <Eigen/Dense>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "elcp/errors.hpp"

namespace elcp {

struct Dataset {
    Eigen::VectorXd y;
    Eigen::MatrixXd X;  // n x p
};

inline std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    if (res.ec != std::errc())
        throw Error("format_double: conversion failed");
    return std::string(buf, res.ptr);
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);
    return fields;
}

inline double parse_field(const std::string& field, long line_no) {
    if (field.empty())
        throw DataFormatError("line " + std::to_string(line_no) + ": empty field");
    const char* begin = field.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end != begin + field.size())
        throw DataFormatError("line " + std::to_string(line_no) + ": non-numeric field '" +
                              field + "'");
    return v;
}

inline std::string expected_header(int p) {
    std::string h = "y";
    for (int j = 1; j <= p; ++j) h += ",x" + std::to_string(j);
    return h;
}

}  // namespace detail

inline Dataset read_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataFormatError("cannot open dataset file: " + path);

    std::string line;
    if (!std::getline(in, line)) throw DataFormatError("dataset file is empty: " + path);
    const auto header = detail::split_csv_line(line);
    const int p = static_cast<int>(header.size()) - 1;
    if (p < 1 || header[0] != "y")
        throw DataFormatError("line 1: header must be y,x1,...,xp");
    for (int j = 1; j <= p; ++j)
        if (header[static_cast<std::size_t>(j)] != "x" + std::to_string(j))
            throw DataFormatError("line 1: header must be " + detail::expected_header(p));

    std::vector<double> ys;
    std::vector<double> xs;
    long line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto fields = detail::split_csv_line(line);
        if (static_cast<int>(fields.size()) != p + 1)
            throw DataFormatError("line " + std::to_string(line_no) + ": expected " +
                                  std::to_string(p + 1) + " fields, got " +
                                  std::to_string(fields.size()));
        ys.push_back(detail::parse_field(fields[0], line_no));
        for (int j = 1; j <= p; ++j)
            xs.push_back(detail::parse_field(fields[static_cast<std::size_t>(j)], line_no));
    }
    const auto n = static_cast<Eigen::Index>(ys.size());
    if (n < 2) throw DataFormatError("dataset needs at least 2 observations");

    Dataset d;
    d.y = Eigen::Map<Eigen::VectorXd>(ys.data(), n);
    d.X = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        xs.data(), n, p);
    return d;
}

inline void write_dataset(const std::string& path, const Eigen::VectorXd& y,
                          const Eigen::MatrixXd& X) {
    if (y.size() != X.rows()) throw DimensionError("write_dataset: y/X row mismatch");
    std::ofstream out(path);
    if (!out) throw DataFormatError("cannot open output file: " + path);
    out << detail::expected_header(static_cast<int>(X.cols())) << "\n";
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        out << format_double(y[i]);
        for (Eigen::Index j = 0; j < X.cols(); ++j) out << ',' << format_double(X(i, j));
        out << '\n';
    }
    if (!out) throw DataFormatError("write failed: " + path);
}

}  // namespace elcp
