#pragma once

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "certify.hpp"

namespace ctred {

using json = nlohmann::json;

/// Non-finite values have no JSON literal; they are written as strings.
inline json number(double v) {
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return "nan";
    return v > 0 ? "inf" : "-inf";
}

inline json matrix_to_json(const Matrix& M) {
    json rows = json::array();
    for (Index i = 0; i < M.rows(); ++i) {
        json r = json::array();
        for (Index j = 0; j < M.cols(); ++j) r.push_back(M(i, j));
        rows.push_back(r);
    }
    return rows;
}

inline json complex_list(const std::vector<cplx>& v) {
    json out = json::array();
    for (auto& z : v) out.push_back({number(z.real()), number(z.imag())});
    return out;
}

namespace detail {

inline Matrix matrix_from_json(const json& j, const char* name, Index rows, Index cols) {
    if (!j.is_array()) throw Error(ErrorKind::Parse, std::string(name) + " must be an array of rows");
    Index r = static_cast<Index>(j.size());
    if (r == 0) {
        if (rows > 0 && cols > 0) throw Error(ErrorKind::Dimension, std::string(name) + " is empty");
        return Matrix::Zero(rows < 0 ? 0 : rows, cols < 0 ? 0 : cols);
    }
    if (!j[0].is_array()) throw Error(ErrorKind::Parse, std::string(name) + " must be an array of rows");
    Index c = static_cast<Index>(j[0].size());
    Matrix M(r, c);
    for (Index i = 0; i < r; ++i) {
        const json& row = j[i];
        if (!row.is_array() || static_cast<Index>(row.size()) != c)
            throw Error(ErrorKind::Parse, std::string(name) + " is not rectangular");
        for (Index k = 0; k < c; ++k) {
            if (!row[k].is_number()) throw Error(ErrorKind::Parse, std::string(name) + " has a non-numeric entry");
            M(i, k) = row[k].get<double>();
        }
    }
    if ((rows >= 0 && r != rows) || (cols >= 0 && c != cols))
        throw Error(ErrorKind::Dimension, std::string(name) + " has shape " + std::to_string(r) + "x" +
                                              std::to_string(c) + ", expected " + std::to_string(rows) + "x" +
                                              std::to_string(cols));
    return M;
}

}  // namespace detail

struct SystemFile {
    StateSpace system;
    std::string name;
};

inline json system_to_json(const StateSpace& S, const std::string& name = "") {
    json j;
    j["A"] = matrix_to_json(S.A);
    j["B"] = matrix_to_json(S.B);
    j["C"] = matrix_to_json(S.C);
    j["D"] = matrix_to_json(S.D);
    if (!name.empty()) j["name"] = name;
    return j;
}

inline SystemFile system_from_json(const json& j) {
    if (!j.is_object()) throw Error(ErrorKind::Parse, "system file must be a JSON object");
    for (const char* k : {"A", "B", "C", "D"})
        if (!j.contains(k)) throw Error(ErrorKind::Parse, std::string("missing key ") + k);
    Matrix D = detail::matrix_from_json(j["D"], "D", -1, -1);
    Matrix A = detail::matrix_from_json(j["A"], "A", -1, -1);
    Index n = A.rows();
    if (A.cols() != n) throw Error(ErrorKind::Dimension, "A must be square");
    Matrix B = detail::matrix_from_json(j["B"], "B", n, n == 0 ? D.cols() : -1);
    Matrix C = detail::matrix_from_json(j["C"], "C", n == 0 ? D.rows() : -1, n);
    if (n == 0) {
        B = Matrix::Zero(0, D.cols());
        C = Matrix::Zero(D.rows(), 0);
    }
    SystemFile f;
    f.system = make_system(A, B, C, D);
    if (j.contains("name") && j["name"].is_string()) f.name = j["name"].get<std::string>();
    return f;
}

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw Error(ErrorKind::Parse, path + ": " + e.what());
    }
}

inline SystemFile read_system_file(const std::string& path) { return system_from_json(read_json_file(path)); }

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + path);
    out << text;
}

inline void write_system_file(const std::string& path, const StateSpace& S, const std::string& name = "") {
    write_text_file(path, system_to_json(S, name).dump(2) + "\n");
}

inline json certificate_to_json(const ReductionCertificate& c) {
    json j;
    j["theorem"] = to_string(c.theorem);
    json q = json::object();
    for (auto& [k, v] : c.quantities) q[k] = number(v);
    j["quantities"] = q;
    j["condition_satisfied"] = c.condition_satisfied;
    j["cost_bound"] = c.cost_bound ? number(*c.cost_bound) : json(nullptr);
    j["verified_stable"] = c.verified_stable;
    if (!c.reason.empty()) j["reason"] = c.reason;
    return j;
}

}  // namespace ctred
