#include "varibc/mesh_io.hpp"

#include "varibc/errors.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

namespace varibc {

namespace {

// Yields whitespace-separated tokens with '#' comments stripped.
class Tokenizer {
public:
    explicit Tokenizer(std::istream& in) : in_(in) {}

    bool next(std::string& tok) {
        while (!(line_ >> tok)) {
            std::string raw;
            if (!std::getline(in_, raw)) return false;
            ++lineno_;
            if (auto pos = raw.find('#'); pos != std::string::npos) raw.erase(pos);
            line_.clear();
            line_.str(raw);
        }
        return true;
    }

    std::string expect(const char* what) {
        std::string t;
        if (!next(t)) throw MeshError(std::string("mesh file: unexpected end of input, expected ") + what);
        return t;
    }

    double number(const char* what) {
        const std::string t = expect(what);
        try {
            std::size_t used = 0;
            const double v = std::stod(t, &used);
            if (used != t.size()) throw std::invalid_argument(t);
            return v;
        } catch (const std::exception&) {
            throw MeshError("mesh file line " + std::to_string(lineno_) + ": bad " + what + " '" + t + "'");
        }
    }

    long integer(const char* what) {
        const std::string t = expect(what);
        try {
            std::size_t used = 0;
            const long v = std::stol(t, &used);
            if (used != t.size()) throw std::invalid_argument(t);
            return v;
        } catch (const std::exception&) {
            throw MeshError("mesh file line " + std::to_string(lineno_) + ": bad " + what + " '" + t + "'");
        }
    }

private:
    std::istream& in_;
    std::istringstream line_;
    std::size_t lineno_ = 0;
};

std::ofstream open_out(const std::string& path) {
    std::ofstream f(path);
    if (!f) throw Error("cannot open '" + path + "' for writing");
    f << std::setprecision(17);
    return f;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw Error("cannot open '" + path + "' for reading");
    return f;
}

}  // namespace

MeshModel read_mesh(std::istream& in, double thickness) {
    Tokenizer tok(in);
    if (tok.expect("'nodes'") != "nodes") throw MeshError("mesh file: header must start with 'nodes'");
    const long n = tok.integer("node count");
    if (tok.expect("'triangles'") != "triangles") throw MeshError("mesh file: expected 'triangles'");
    const long m = tok.integer("triangle count");
    if (n < 3 || m < 1) throw MeshError("mesh file: need at least 3 nodes and 1 triangle");
    std::vector<Point> nodes(n);
    for (long i = 0; i < n; ++i) {
        const double x = tok.number("x");
        const double y = tok.number("y");
        nodes[i] = Point(x, y);
    }
    std::vector<Triangle> tris(m);
    std::vector<ElementTag> tags(m);
    for (long e = 0; e < m; ++e) {
        for (int k = 0; k < 3; ++k) tris[e][k] = static_cast<int>(tok.integer("node index"));
        const long t = tok.integer("tag");
        if (t < 0 || t > 2) throw MeshError("mesh file: tag must be 0, 1 or 2");
        tags[e] = static_cast<ElementTag>(t);
    }
    return MeshModel(std::move(nodes), std::move(tris), std::move(tags), thickness);
}

MeshModel read_mesh_file(const std::string& path, double thickness) {
    auto f = open_in(path);
    return read_mesh(f, thickness);
}

void write_mesh(std::ostream& out, const MeshModel& mesh) {
    const auto old = out.precision(17);
    out << "nodes " << mesh.num_nodes() << " triangles " << mesh.num_elements() << "\n";
    for (const auto& p : mesh.nodes()) out << p.x() << " " << p.y() << "\n";
    for (int e = 0; e < mesh.num_elements(); ++e) {
        const auto& t = mesh.triangle(e);
        out << t[0] << " " << t[1] << " " << t[2] << " " << static_cast<int>(mesh.tag(e)) << "\n";
    }
    out.precision(old);
}

void write_mesh_file(const std::string& path, const MeshModel& mesh) {
    auto f = open_out(path);
    write_mesh(f, mesh);
    if (!f) throw Error("write failed for '" + path + "'");
}

void write_vtk(std::ostream& out, const MeshModel& mesh, const std::vector<CellField>& fields,
               const std::string& title) {
    const auto old = out.precision(17);
    out << "# vtk DataFile Version 4.2\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
    out << "POINTS " << mesh.num_nodes() << " double\n";
    for (const auto& p : mesh.nodes()) out << p.x() << " " << p.y() << " 0\n";
    out << "CELLS " << mesh.num_elements() << " " << 4 * mesh.num_elements() << "\n";
    for (const auto& t : mesh.triangles()) out << "3 " << t[0] << " " << t[1] << " " << t[2] << "\n";
    out << "CELL_TYPES " << mesh.num_elements() << "\n";
    for (int e = 0; e < mesh.num_elements(); ++e) out << "5\n";
    out << "CELL_DATA " << mesh.num_elements() << "\n";
    out << "SCALARS tag int 1\nLOOKUP_TABLE default\n";
    for (auto t : mesh.tags()) out << static_cast<int>(t) << "\n";
    for (const auto& [name, values] : fields) {
        if (static_cast<int>(values.size()) != mesh.num_elements())
            throw Error("vtk field '" + name + "' has wrong length");
        out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
        for (double v : values) out << v << "\n";
    }
    out.precision(old);
}

void write_vtk_file(const std::string& path, const MeshModel& mesh, const std::vector<CellField>& fields) {
    auto f = open_out(path);
    write_vtk(f, mesh, fields);
    if (!f) throw Error("write failed for '" + path + "'");
}

MeshModel read_vtk(std::istream& in, double thickness) {
    std::string line;
    std::vector<Point> nodes;
    std::vector<Triangle> tris;
    std::vector<ElementTag> tags;
    std::string word;
    while (in >> word) {
        if (word == "POINTS") {
            long n;
            std::string type;
            in >> n >> type;
            nodes.resize(n);
            for (long i = 0; i < n; ++i) {
                double x, y, z;
                in >> x >> y >> z;
                nodes[i] = Point(x, y);
            }
        } else if (word == "CELLS") {
            long m, total;
            in >> m >> total;
            tris.resize(m);
            for (long e = 0; e < m; ++e) {
                int k;
                in >> k;
                if (k != 3) throw MeshError("vtk: only triangles are supported");
                in >> tris[e][0] >> tris[e][1] >> tris[e][2];
            }
        } else if (word == "SCALARS") {
            std::string name, type;
            in >> name >> type;
            std::getline(in, line);
            std::getline(in, line);  // LOOKUP_TABLE
            const std::size_t m = tris.size();
            if (name == "tag") {
                tags.resize(m);
                for (std::size_t e = 0; e < m; ++e) {
                    int t;
                    in >> t;
                    tags[e] = static_cast<ElementTag>(t);
                }
            } else {
                double skip;
                for (std::size_t e = 0; e < m; ++e) in >> skip;
            }
        }
        if (in.fail()) throw MeshError("vtk: malformed file");
    }
    if (tags.empty()) tags.assign(tris.size(), ElementTag::designable);
    return MeshModel(std::move(nodes), std::move(tris), std::move(tags), thickness);
}

MeshModel read_vtk_file(const std::string& path, double thickness) {
    auto f = open_in(path);
    return read_vtk(f, thickness);
}

MeshModel import_mesh(const std::string& path, double thickness) {
    if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".vtk") == 0)
        return read_vtk_file(path, thickness);
    return read_mesh_file(path, thickness);
}

}  // namespace varibc
