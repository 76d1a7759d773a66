#include "vrb/checkpoint.hpp"

#include <array>
#include <cinttypes>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>

#include "vrb/errors.hpp"

namespace vrb {

namespace {

constexpr char kMagic[4] = {'V', 'R', 'B', 'C'};
constexpr std::uint32_t kFormatVersion = 1;

std::uint32_t crc32(const unsigned char* data, std::size_t n) {
    static const auto table = [] {
        std::array<std::uint32_t, 256> t{};
        for (std::uint32_t i = 0; i < 256; ++i) {
            std::uint32_t c = i;
            for (int k = 0; k < 8; ++k) c = (c & 1u) ? 0xedb88320u ^ (c >> 1) : c >> 1;
            t[i] = c;
        }
        return t;
    }();
    std::uint32_t crc = 0xffffffffu;
    for (std::size_t i = 0; i < n; ++i) {
        crc = table[(crc ^ data[i]) & 0xffu] ^ (crc >> 8);
    }
    return crc ^ 0xffffffffu;
}

class Writer {
public:
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<unsigned char>(v >> (8 * i)));
    }
    void u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<unsigned char>(v >> (8 * i)));
    }
    void f64(double v) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, 8);
        u64(bits);
    }
    void str(const std::string& s) {
        u32(static_cast<std::uint32_t>(s.size()));
        buf_.insert(buf_.end(), s.begin(), s.end());
    }
    void array(const std::string& name, const std::vector<double>& v) {
        str(name);
        u64(v.size());
        for (double x : v) f64(x);
    }
    const std::vector<unsigned char>& bytes() const { return buf_; }

private:
    std::vector<unsigned char> buf_;
};

class Reader {
public:
    Reader(const unsigned char* data, std::size_t n) : data_(data), n_(n) {}

    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(data_[pos_ + i]) << (8 * i);
        pos_ += 4;
        return v;
    }
    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(data_[pos_ + i]) << (8 * i);
        pos_ += 8;
        return v;
    }
    double f64() {
        const std::uint64_t bits = u64();
        double v;
        std::memcpy(&v, &bits, 8);
        return v;
    }
    std::string str() {
        const std::uint32_t len = u32();
        need(len);
        std::string s(reinterpret_cast<const char*>(data_ + pos_), len);
        pos_ += len;
        return s;
    }
    bool done() const { return pos_ == n_; }

private:
    void need(std::size_t k) const {
        if (pos_ + k > n_) throw IntegrityError("checkpoint file is truncated");
    }
    const unsigned char* data_;
    std::size_t n_;
    std::size_t pos_ = 0;
};

std::vector<double> widths_to_doubles(const std::vector<int>& w) {
    return {w.begin(), w.end()};
}

std::vector<int> widths_from_doubles(const std::vector<double>& w) {
    std::vector<int> out;
    out.reserve(w.size());
    for (double x : w) out.push_back(static_cast<int>(x));
    return out;
}

std::string fmt_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

AdamState get_adam(const std::map<std::string, std::vector<double>>& arrays,
                   const std::map<std::string, std::string>& meta, const std::string& name) {
    AdamState st;
    st.first_moment = arrays.at("opt." + name + ".m");
    st.second_moment = arrays.at("opt." + name + ".v");
    st.step_count = std::stoull(meta.at("opt." + name + ".step"));
    st.learning_rate = std::stod(meta.at("opt." + name + ".lr"));
    st.beta1 = std::stod(meta.at("opt." + name + ".beta1"));
    st.beta2 = std::stod(meta.at("opt." + name + ".beta2"));
    st.epsilon_stab = std::stod(meta.at("opt." + name + ".eps"));
    return st;
}

} // namespace

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
    Writer payload;
    std::map<std::string, std::string> meta;
    meta["seed"] = std::to_string(ckpt.seed);
    meta["iteration"] = std::to_string(ckpt.iteration);
    meta["phi"] = fmt_real(ckpt.phi);
    meta["schema_hash"] = ckpt.schema_hash;
    meta["variant"] = variant_name(ckpt.variant);
    meta["enc.d_z"] = std::to_string(ckpt.estimator.enc.d_z);

    std::vector<std::pair<std::string, std::vector<double>>> arrays;
    arrays.emplace_back("policy.widths", widths_to_doubles(ckpt.policy.spec.layer_widths));
    arrays.emplace_back("policy.params", ckpt.policy.params);
    arrays.emplace_back("value.widths", widths_to_doubles(ckpt.value.spec.layer_widths));
    arrays.emplace_back("value.params", ckpt.value.params);
    arrays.emplace_back("enc.g.widths",
                        widths_to_doubles(ckpt.estimator.enc.g_spec.layer_widths));
    arrays.emplace_back("enc.g.params", ckpt.estimator.enc.g_params);
    arrays.emplace_back("enc.h.widths",
                        widths_to_doubles(ckpt.estimator.enc.h_spec.layer_widths));
    arrays.emplace_back("enc.h.params", ckpt.estimator.enc.h_params);
    arrays.emplace_back("heads.g.widths",
                        widths_to_doubles(ckpt.estimator.heads.g_spec.layer_widths));
    arrays.emplace_back("heads.g.params", ckpt.estimator.heads.g_params);
    arrays.emplace_back("heads.h.widths",
                        widths_to_doubles(ckpt.estimator.heads.h_spec.layer_widths));
    arrays.emplace_back("heads.h.params", ckpt.estimator.heads.h_params);
    auto adam_arrays = [&](const std::string& name, const AdamState& st) {
        arrays.emplace_back("opt." + name + ".m", st.first_moment);
        arrays.emplace_back("opt." + name + ".v", st.second_moment);
        meta["opt." + name + ".step"] = std::to_string(st.step_count);
        meta["opt." + name + ".lr"] = fmt_real(st.learning_rate);
        meta["opt." + name + ".beta1"] = fmt_real(st.beta1);
        meta["opt." + name + ".beta2"] = fmt_real(st.beta2);
        meta["opt." + name + ".eps"] = fmt_real(st.epsilon_stab);
    };
    adam_arrays("policy", ckpt.pol_opt.policy);
    adam_arrays("value", ckpt.pol_opt.value);
    adam_arrays("enc_g", ckpt.est_opt.enc_g);
    adam_arrays("enc_h", ckpt.est_opt.enc_h);
    adam_arrays("head_g", ckpt.est_opt.head_g);
    adam_arrays("head_h", ckpt.est_opt.head_h);

    payload.u32(static_cast<std::uint32_t>(meta.size()));
    for (const auto& [k, v] : meta) {
        payload.str(k);
        payload.str(v);
    }
    payload.u32(static_cast<std::uint32_t>(arrays.size()));
    for (const auto& [name, data] : arrays) {
        payload.array(name, data);
    }
    std::vector<unsigned char> body = payload.bytes();

    Writer head;
    head.u32(kFormatVersion);
    head.u32(crc32(body.data(), body.size()));

    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open checkpoint file for writing: " + path);
    out.write(kMagic, 4);
    out.write(reinterpret_cast<const char*>(head.bytes().data()),
              static_cast<std::streamsize>(head.bytes().size()));
    out.write(reinterpret_cast<const char*>(body.data()), static_cast<std::streamsize>(body.size()));
    if (!out) throw IoError("failed writing checkpoint file: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open checkpoint file: " + path);
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());

    if (bytes.size() < 12 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
        throw IntegrityError("not a checkpoint file (bad magic): " + path);
    }
    Reader head(bytes.data() + 4, 8);
    const std::uint32_t version = head.u32();
    if (version != kFormatVersion) {
        throw VersionError("unsupported checkpoint format version " + std::to_string(version));
    }
    const std::uint32_t stored_crc = head.u32();
    const unsigned char* body = bytes.data() + 12;
    const std::size_t body_len = bytes.size() - 12;
    if (crc32(body, body_len) != stored_crc) {
        throw IntegrityError("checkpoint checksum mismatch (corrupt or truncated): " + path);
    }

    Reader r(body, body_len);
    std::map<std::string, std::string> meta;
    const std::uint32_t n_meta = r.u32();
    for (std::uint32_t i = 0; i < n_meta; ++i) {
        const std::string k = r.str();
        meta[k] = r.str();
    }
    std::map<std::string, std::vector<double>> arrays;
    const std::uint32_t n_arrays = r.u32();
    for (std::uint32_t i = 0; i < n_arrays; ++i) {
        const std::string name = r.str();
        const std::uint64_t count = r.u64();
        std::vector<double> v(count);
        for (std::uint64_t j = 0; j < count; ++j) v[j] = r.f64();
        arrays[name] = std::move(v);
    }
    if (!r.done()) throw IntegrityError("checkpoint has trailing bytes: " + path);

    try {
        Checkpoint ckpt;
        ckpt.version = version;
        ckpt.seed = std::stoull(meta.at("seed"));
        ckpt.iteration = std::stoull(meta.at("iteration"));
        ckpt.phi = std::stod(meta.at("phi"));
        ckpt.schema_hash = meta.at("schema_hash");
        ckpt.variant = variant_from_name(meta.at("variant"));

        ckpt.policy.spec.layer_widths = widths_from_doubles(arrays.at("policy.widths"));
        ckpt.policy.params = arrays.at("policy.params");
        ckpt.value.spec.layer_widths = widths_from_doubles(arrays.at("value.widths"));
        ckpt.value.params = arrays.at("value.params");
        ckpt.estimator.enc.d_z = std::stoi(meta.at("enc.d_z"));
        ckpt.estimator.enc.g_spec.layer_widths = widths_from_doubles(arrays.at("enc.g.widths"));
        ckpt.estimator.enc.g_params = arrays.at("enc.g.params");
        ckpt.estimator.enc.h_spec.layer_widths = widths_from_doubles(arrays.at("enc.h.widths"));
        ckpt.estimator.enc.h_params = arrays.at("enc.h.params");
        ckpt.estimator.heads.g_spec.layer_widths =
            widths_from_doubles(arrays.at("heads.g.widths"));
        ckpt.estimator.heads.g_params = arrays.at("heads.g.params");
        ckpt.estimator.heads.h_spec.layer_widths =
            widths_from_doubles(arrays.at("heads.h.widths"));
        ckpt.estimator.heads.h_params = arrays.at("heads.h.params");
        ckpt.pol_opt.policy = get_adam(arrays, meta, "policy");
        ckpt.pol_opt.value = get_adam(arrays, meta, "value");
        ckpt.est_opt.enc_g = get_adam(arrays, meta, "enc_g");
        ckpt.est_opt.enc_h = get_adam(arrays, meta, "enc_h");
        ckpt.est_opt.head_g = get_adam(arrays, meta, "head_g");
        ckpt.est_opt.head_h = get_adam(arrays, meta, "head_h");
        return ckpt;
    } catch (const std::out_of_range&) {
        throw IntegrityError("checkpoint is missing required sections: " + path);
    }
}

} // namespace vrb
