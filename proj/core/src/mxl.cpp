#include "symr/musicxml.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

#include <zlib.h>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

namespace symr {

namespace {

uint16_t rd16(const uint8_t* p) { return p[0] | p[1] << 8; }
uint32_t rd32(const uint8_t* p) {
    return p[0] | p[1] << 8 | p[2] << 16 | (uint32_t)p[3] << 24;
}

std::string inflate_raw(const uint8_t* data, size_t csize, size_t usize) {
    std::string out(usize, '\0');
    z_stream zs{};
    if (inflateInit2(&zs, -15) != Z_OK) throw Error("inflateInit failed");
    zs.next_in = const_cast<Bytef*>(data);
    zs.avail_in = static_cast<uInt>(csize);
    zs.next_out = reinterpret_cast<Bytef*>(out.data());
    zs.avail_out = static_cast<uInt>(usize);
    int rc = inflate(&zs, Z_FINISH);
    inflateEnd(&zs);
    if (rc != Z_STREAM_END) throw ParseError("corrupt deflate stream in container");
    return out;
}

struct ZipArchive {
    std::vector<uint8_t> bytes;

    explicit ZipArchive(const std::string& path) {
        std::ifstream f(path, std::ios::binary);
        if (!f) throw Error("cannot open " + path);
        bytes.assign((std::istreambuf_iterator<char>(f)),
                     std::istreambuf_iterator<char>());
    }

    std::string extract(const std::string& name) const {
        // Locate end-of-central-directory.
        if (bytes.size() < 22) throw ParseError("not a zip container");
        size_t eocd = std::string::npos;
        for (size_t i = bytes.size() - 22; i + 4 >= 4; --i) {
            if (rd32(&bytes[i]) == 0x06054b50) {
                eocd = i;
                break;
            }
            if (i == 0) break;
        }
        if (eocd == std::string::npos) throw ParseError("zip central directory missing");
        uint16_t count = rd16(&bytes[eocd + 10]);
        uint32_t cd_off = rd32(&bytes[eocd + 16]);

        size_t p = cd_off;
        for (int i = 0; i < count; ++i) {
            if (p + 46 > bytes.size() || rd32(&bytes[p]) != 0x02014b50)
                throw ParseError("bad central directory entry",
                                 static_cast<long>(p));
            uint16_t method = rd16(&bytes[p + 10]);
            uint32_t csize = rd32(&bytes[p + 20]);
            uint32_t usize = rd32(&bytes[p + 24]);
            uint16_t nlen = rd16(&bytes[p + 28]);
            uint16_t elen = rd16(&bytes[p + 30]);
            uint16_t clen = rd16(&bytes[p + 32]);
            uint32_t lho = rd32(&bytes[p + 42]);
            std::string fname(reinterpret_cast<const char*>(&bytes[p + 46]), nlen);
            p += 46 + nlen + elen + clen;
            if (fname != name) continue;

            if (lho + 30 > bytes.size() || rd32(&bytes[lho]) != 0x04034b50)
                throw ParseError("bad local file header", static_cast<long>(lho));
            uint16_t lnlen = rd16(&bytes[lho + 26]);
            uint16_t lelen = rd16(&bytes[lho + 28]);
            size_t data = lho + 30 + lnlen + lelen;
            if (data + csize > bytes.size())
                throw ParseError("zip entry overruns file", static_cast<long>(data));
            if (method == 0)
                return std::string(reinterpret_cast<const char*>(&bytes[data]), csize);
            if (method == 8) return inflate_raw(&bytes[data], csize, usize);
            throw UnsupportedFormat("zip compression method " + std::to_string(method));
        }
        throw ParseError("container member not found: " + name);
    }
};

}  // namespace

std::string mxl_rootfile(const std::string& path) {
    ZipArchive zip(path);
    std::string container = zip.extract("META-INF/container.xml");

    boost::property_tree::ptree pt;
    std::istringstream ss(container);
    boost::property_tree::read_xml(ss, pt);
    std::string root =
        pt.get<std::string>("container.rootfiles.rootfile.<xmlattr>.full-path");
    return zip.extract(root);
}

}  // namespace symr
