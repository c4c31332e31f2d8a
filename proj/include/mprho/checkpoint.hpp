// Copyright 2026 The mprho Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Portable MPrho checkpoints.
//
// Layout: the 7 bytes "MPRHO1\n", a little-endian uint64 header length, a
// JSON header (n, oc, canonical, and per site its labels plus the offset and
// count of its entries in the payload), then the payload as little-endian
// IEEE-754 doubles, real and imaginary part interleaved.

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mprho/mprho.hpp"

namespace mprho {

inline constexpr char kCheckpointMagic[] = "MPRHO1\n";

namespace detail {

inline void put_u64_le(std::ostream &os, std::uint64_t v) {
    char b[8];
    for (int k = 0; k < 8; ++k) b[k] = static_cast<char>((v >> (8 * k)) & 0xFF);
    os.write(b, 8);
}

inline std::uint64_t get_u64_le(std::istream &is) {
    unsigned char b[8];
    is.read(reinterpret_cast<char *>(b), 8);
    if (!is) throw ParseError("checkpoint truncated");
    std::uint64_t v = 0;
    for (int k = 0; k < 8; ++k) v |= static_cast<std::uint64_t>(b[k]) << (8 * k);
    return v;
}

inline void put_f64_le(std::ostream &os, double x) {
    put_u64_le(os, std::bit_cast<std::uint64_t>(x));
}

inline double get_f64_le(std::istream &is) {
    return std::bit_cast<double>(get_u64_le(is));
}

}  // namespace detail

inline void write_checkpoint(std::ostream &os, const MPrho &rho) {
    nlohmann::json header;
    header["n"] = rho.size();
    header["oc"] = rho.oc();
    header["canonical"] = rho.is_canonical();
    nlohmann::json sites = nlohmann::json::array();
    std::uint64_t offset = 0;
    for (const auto &t : rho.sites()) {
        nlohmann::json labels = nlohmann::json::array();
        for (const auto &l : t.labels()) labels.push_back({{"name", l.name}, {"dim", l.dim}, {"kind", to_string(l.kind)}});
        sites.push_back({{"labels", labels}, {"offset", offset}, {"count", t.size()}});
        offset += t.size();
    }
    header["sites"] = sites;
    const std::string h = header.dump();
    os.write(kCheckpointMagic, sizeof(kCheckpointMagic) - 1);
    detail::put_u64_le(os, h.size());
    os.write(h.data(), static_cast<std::streamsize>(h.size()));
    for (const auto &t : rho.sites()) {
        for (const auto &z : t.data()) {
            detail::put_f64_le(os, z.real());
            detail::put_f64_le(os, z.imag());
        }
    }
}

inline MPrho read_checkpoint(std::istream &is) {
    char magic[sizeof(kCheckpointMagic) - 1];
    is.read(magic, sizeof(magic));
    if (!is || std::memcmp(magic, kCheckpointMagic, sizeof(magic)) != 0) throw ParseError("not an MPrho checkpoint");
    const std::uint64_t len = detail::get_u64_le(is);
    if (len > (std::uint64_t{1} << 32)) throw ParseError("checkpoint header length implausible");
    std::string h(len, '\0');
    is.read(h.data(), static_cast<std::streamsize>(len));
    if (!is) throw ParseError("checkpoint header truncated");
    nlohmann::json header;
    try {
        header = nlohmann::json::parse(h);
    } catch (const nlohmann::json::exception &e) {
        throw ParseError(std::string("checkpoint header: ") + e.what());
    }
    try {
        std::vector<LabeledTensor> sites;
        std::uint64_t expect = 0;
        for (const auto &s : header.at("sites")) {
            std::vector<IndexLabel> labels;
            for (const auto &l : s.at("labels")) {
                labels.push_back({l.at("name").get<std::string>(), l.at("dim").get<std::size_t>(),
                                  index_kind_from_string(l.at("kind").get<std::string>())});
            }
            const auto count = s.at("count").get<std::uint64_t>();
            if (s.at("offset").get<std::uint64_t>() != expect) throw ParseError("checkpoint site offsets are not contiguous");
            expect += count;
            std::vector<cplx> data(count);
            for (auto &z : data) {
                const double re = detail::get_f64_le(is);
                const double im = detail::get_f64_le(is);
                z = {re, im};
            }
            sites.emplace_back(std::move(labels), std::move(data));
        }
        if (sites.size() != header.at("n").get<std::size_t>()) throw ParseError("checkpoint site count mismatch");
        return MPrho(std::move(sites), header.at("oc").get<std::size_t>(), header.at("canonical").get<bool>());
    } catch (const nlohmann::json::exception &e) {
        throw ParseError(std::string("checkpoint header: ") + e.what());
    }
}

inline void save_checkpoint(const std::string &path, const MPrho &rho) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ParseError("cannot open '" + path + "' for writing");
    write_checkpoint(os, rho);
}

inline MPrho load_checkpoint(const std::string &path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ParseError("cannot open '" + path + "'");
    return read_checkpoint(is);
}

}  // namespace mprho
