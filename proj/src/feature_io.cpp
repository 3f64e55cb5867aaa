#include "bootood/feature_io.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace bootood {

namespace {

constexpr char kMagic[4] = {'B', 'O', 'F', 'F'};

template <typename T>
void write_pod(std::ostream& out, const T& value) {
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_pod(std::istream& in, const char* what) {
    T value;
    in.read(reinterpret_cast<char*>(&value), sizeof(T));
    if (!in) throw IoError(std::string("CorruptHeader: truncated ") + what);
    return value;
}

} // namespace

void write_features(const std::filesystem::path& path, const FeatureFile& file) {
    if (file.has_labels() && file.labels.size() != file.features.rows()) {
        throw IoError("DimMismatch: label count does not match feature rows");
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("IOFailure: cannot open '" + path.string() + "' for writing");
    out.write(kMagic, sizeof(kMagic));
    write_pod(out, kFeatureFileVersion);
    write_pod(out, static_cast<std::uint64_t>(file.features.rows()));
    write_pod(out, static_cast<std::uint64_t>(file.features.cols()));
    write_pod(out, static_cast<std::uint8_t>(file.has_labels() ? 1 : 0));
    const auto data = file.features.data();
    out.write(reinterpret_cast<const char*>(data.data()),
              static_cast<std::streamsize>(data.size() * sizeof(double)));
    if (file.has_labels()) {
        for (int label : file.labels) {
            write_pod(out, static_cast<std::int32_t>(label));
        }
    }
    if (!out) throw IoError("IOFailure: short write to '" + path.string() + "'");
}

FeatureFile read_features(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("IOFailure: cannot open '" + path.string() + "' for reading");
    char magic[4];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
        throw IoError("CorruptHeader: bad magic in '" + path.string() + "'");
    }
    const auto version = read_pod<std::uint32_t>(in, "version");
    if (version != kFeatureFileVersion) {
        throw IoError("CorruptHeader: unsupported feature file version " +
                      std::to_string(version));
    }
    const auto n = read_pod<std::uint64_t>(in, "row count");
    const auto dim = read_pod<std::uint64_t>(in, "dim");
    const auto has_labels = read_pod<std::uint8_t>(in, "label flag");

    FeatureFile file;
    file.features = Matrix(static_cast<std::size_t>(n), static_cast<std::size_t>(dim));
    auto data = file.features.data();
    in.read(reinterpret_cast<char*>(data.data()),
            static_cast<std::streamsize>(data.size() * sizeof(double)));
    if (!in && !data.empty()) {
        throw IoError("DimMismatch: feature payload shorter than declared " +
                      std::to_string(n) + "x" + std::to_string(dim));
    }
    if (has_labels) {
        file.labels.resize(static_cast<std::size_t>(n));
        for (auto& label : file.labels) {
            label = read_pod<std::int32_t>(in, "label");
        }
    }
    // Trailing bytes mean the header lied about the payload.
    in.peek();
    if (!in.eof()) throw IoError("DimMismatch: trailing bytes after declared payload");
    return file;
}

void write_features_csv(const std::filesystem::path& path, const FeatureFile& file) {
    if (file.has_labels() && file.labels.size() != file.features.rows()) {
        throw IoError("DimMismatch: label count does not match feature rows");
    }
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("IOFailure: cannot open '" + path.string() + "' for writing");
    for (std::size_t c = 0; c < file.features.cols(); ++c) {
        if (c) out << ',';
        out << "feature_" << c;
    }
    if (file.has_labels()) out << (file.features.cols() ? ",label" : "label");
    out << '\n';
    char buf[32];
    for (std::size_t r = 0; r < file.features.rows(); ++r) {
        auto row = file.features.row(r);
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) out << ',';
            std::snprintf(buf, sizeof(buf), "%.17g", row[c]);
            out << buf;
        }
        if (file.has_labels()) out << ',' << file.labels[r];
        out << '\n';
    }
    if (!out) throw IoError("IOFailure: short write to '" + path.string() + "'");
}

FeatureFile read_features_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("IOFailure: cannot open '" + path.string() + "' for reading");
    std::string header;
    if (!std::getline(in, header)) throw IoError("CorruptHeader: empty CSV");
    std::size_t dim = 0;
    bool has_labels = false;
    {
        std::stringstream ss(header);
        std::string col;
        while (std::getline(ss, col, ',')) {
            if (col == "label") has_labels = true;
            else if (col.rfind("feature_", 0) == 0) ++dim;
            else throw IoError("CorruptHeader: unexpected CSV column '" + col + "'");
        }
    }
    Vector values;
    std::vector<int> labels;
    std::string line;
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::size_t col = 0;
        while (std::getline(ss, cell, ',')) {
            if (col < dim) values.push_back(std::stod(cell));
            else if (has_labels && col == dim) labels.push_back(std::stoi(cell));
            else throw IoError("DimMismatch: too many columns in CSV row");
            ++col;
        }
        if (col != dim + (has_labels ? 1 : 0)) {
            throw IoError("DimMismatch: CSV row has " + std::to_string(col) + " columns");
        }
        ++rows;
    }
    FeatureFile file;
    file.features = Matrix::from_rows(rows, dim, std::move(values));
    file.labels = std::move(labels);
    return file;
}

} // namespace bootood
