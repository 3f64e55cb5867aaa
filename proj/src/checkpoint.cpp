#include "bootood/checkpoint.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace bootood {

namespace {

void write_doubles(std::ostream& out, std::span<const double> values) {
    out.write(reinterpret_cast<const char*>(values.data()),
              static_cast<std::streamsize>(values.size() * sizeof(double)));
}

void read_doubles(std::istream& in, std::span<double> values) {
    in.read(reinterpret_cast<char*>(values.data()),
            static_cast<std::streamsize>(values.size() * sizeof(double)));
    if (!in) throw IoError("CorruptHeader: checkpoint payload shorter than declared");
}

} // namespace

void save_checkpoint(const std::filesystem::path& path, const ModelState& model,
                     const GeometryState& geometry) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("IOFailure: cannot open '" + path.string() + "' for writing");
    const ModelDims dims = dims_of(model);
    out << "BOOTOOD-CKPT v1\n";
    out << "dims " << dims.input_dim << ' ' << dims.hidden_width << ' ' << dims.hidden_layers
        << ' ' << dims.feature_dim << ' ' << dims.num_classes << ' ' << dims.num_shells << '\n';
    {
        char buf[128];
        std::snprintf(buf, sizeof(buf), "geometry %.17g %.17g %.17g", geometry.r_ref,
                      geometry.beta_mu, geometry.beta_r);
        out << buf << ' ' << to_string(geometry.spacing) << ' '
            << (geometry.mu_initialized ? 1 : 0) << ' ' << (geometry.r_initialized ? 1 : 0)
            << '\n';
    }
    out << "data\n";
    for_each_param(model, [&](std::span<const double> p) { write_doubles(out, p); });
    write_doubles(out, geometry.mu);
    write_doubles(out, geometry.shells);
    if (!out) throw IoError("IOFailure: short write to '" + path.string() + "'");
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("IOFailure: cannot open '" + path.string() + "' for reading");
    std::string line;
    if (!std::getline(in, line) || line != "BOOTOOD-CKPT v1") {
        throw IoError("CorruptHeader: not a checkpoint file: '" + path.string() + "'");
    }
    ModelDims dims;
    {
        if (!std::getline(in, line)) throw IoError("CorruptHeader: missing dims line");
        std::istringstream ss(line);
        std::string tag;
        ss >> tag >> dims.input_dim >> dims.hidden_width >> dims.hidden_layers >>
            dims.feature_dim >> dims.num_classes >> dims.num_shells;
        if (tag != "dims" || !ss) throw IoError("CorruptHeader: bad dims line");
    }
    Checkpoint ckpt;
    {
        if (!std::getline(in, line)) throw IoError("CorruptHeader: missing geometry line");
        std::istringstream ss(line);
        std::string tag, spacing;
        double r_ref, beta_mu, beta_r;
        int mu_init, r_init;
        ss >> tag >> r_ref >> beta_mu >> beta_r >> spacing >> mu_init >> r_init;
        if (tag != "geometry" || !ss) throw IoError("CorruptHeader: bad geometry line");
        ckpt.geometry = make_geometry(dims.feature_dim, static_cast<int>(dims.num_shells),
                                      shell_spacing_from_string(spacing), beta_mu, beta_r);
        ckpt.geometry.r_ref = r_ref;
        ckpt.geometry.mu_initialized = mu_init != 0;
        ckpt.geometry.r_initialized = r_init != 0;
    }
    if (!std::getline(in, line) || line != "data") {
        throw IoError("CorruptHeader: missing data marker");
    }
    // Parameter values are immediately overwritten; the rng only shapes them.
    SeededRng scratch(0);
    ckpt.model = init_model(dims, scratch);
    for_each_param(ckpt.model, [&](std::span<double> p) { read_doubles(in, p); });
    read_doubles(in, ckpt.geometry.mu);
    ckpt.geometry.shells.resize(static_cast<std::size_t>(dims.num_shells));
    read_doubles(in, ckpt.geometry.shells);
    in.peek();
    if (!in.eof()) throw IoError("CorruptHeader: trailing bytes after checkpoint payload");
    return ckpt;
}

} // namespace bootood
