"""HTTP annotation service.

Endpoints (JSON, UTF-8):

    POST /api/annotate   body {"text": "..."} -> annotated document
    GET  /api/labels     label alphabets of the three tasks, with glosses
    GET  /api/health     {"status": "ok", "versions": {...}}

Malformed requests get a 400 with {"error": "..."}. The bundle is loaded
once and shared read-only across request threads, so identical requests
produce byte-identical responses. Responses carry a configurable
Access-Control-Allow-Origin header for the web demo.
"""

from __future__ import annotations

import json
import logging
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from . import __version__
from .data import CHUNK_SCHEME, NER_SCHEME, POS_SCHEME
from .pipeline import PipelineBundle, annotate, to_json

log = logging.getLogger("seqlab.server")

POS_GLOSSES = {
    "N": "common noun", "V": "verb", "CH": "punctuation mark", "R": "adverb",
    "E": "preposition", "A": "adjective", "P": "pronoun", "Np": "proper noun",
    "M": "numeral", "C": "conjunction", "Nc": "classifier noun",
    "L": "determiner", "T": "particle", "Ny": "abbreviated noun",
    "Nu": "unit noun", "X": "unclassified word", "B": "borrowed word",
    "S": "bound morpheme", "I": "interjection", "Y": "abbreviation",
    "Vy": "abbreviated verb",
}
CHUNK_GLOSSES = {
    "NP": "noun phrase", "VP": "verb phrase", "PP": "prepositional phrase",
    "AP": "adjective phrase", "QP": "quantity phrase", "RP": "adverb phrase",
}
NER_GLOSSES = {
    "PER": "person name", "LOC": "location name", "ORG": "organization name",
    "MISC": "miscellaneous entity",
}


def labels_payload() -> bytes:
    payload = {
        "pos": [
            {"label": lab, "description": POS_GLOSSES[lab]}
            for lab in POS_SCHEME.base_labels
        ],
        "chunk": [
            {"label": lab, "description": CHUNK_GLOSSES[lab]}
            for lab in CHUNK_SCHEME.base_labels
        ],
        "ner": [
            {"label": lab, "description": NER_GLOSSES[lab]}
            for lab in NER_SCHEME.base_labels
        ],
    }
    return json.dumps(payload, ensure_ascii=False).encode("utf-8")


def make_server(
    bundle: PipelineBundle,
    port: int,
    host: str = "127.0.0.1",
    cors_origin: str = "*",
) -> ThreadingHTTPServer:
    """Build the HTTP server without starting it (port 0 picks a free port)."""
    labels_bytes = labels_payload()
    health_bytes = json.dumps(
        {"status": "ok", "versions": {"seqlab": __version__, "bundle": bundle.meta}},
        ensure_ascii=False,
    ).encode("utf-8")

    class Handler(BaseHTTPRequestHandler):
        protocol_version = "HTTP/1.1"

        def _reply(self, status: int, body: bytes):
            self.send_response(status)
            self.send_header("Content-Type", "application/json; charset=utf-8")
            self.send_header("Content-Length", str(len(body)))
            if cors_origin:
                self.send_header("Access-Control-Allow-Origin", cors_origin)
            self.end_headers()
            self.wfile.write(body)

        def _error(self, status: int, message: str):
            self._reply(status, json.dumps({"error": message}).encode("utf-8"))

        def do_OPTIONS(self):
            self.send_response(204)
            if cors_origin:
                self.send_header("Access-Control-Allow-Origin", cors_origin)
                self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
                self.send_header("Access-Control-Allow-Headers", "Content-Type")
            self.send_header("Content-Length", "0")
            self.end_headers()

        def do_GET(self):
            if self.path == "/api/labels":
                self._reply(200, labels_bytes)
            elif self.path == "/api/health":
                self._reply(200, health_bytes)
            else:
                self._error(404, f"no such endpoint: {self.path}")

        def do_POST(self):
            if self.path != "/api/annotate":
                self._error(404, f"no such endpoint: {self.path}")
                return
            try:
                length = int(self.headers.get("Content-Length", "0"))
                body = self.rfile.read(length)
                payload = json.loads(body.decode("utf-8"))
            except (ValueError, UnicodeDecodeError):
                self._error(400, "request body must be valid JSON")
                return
            if not isinstance(payload, dict) or not isinstance(payload.get("text"), str):
                self._error(400, 'request body must be {"text": string}')
                return
            try:
                doc = annotate(payload["text"], bundle)
            except Exception as exc:  # annotation failure is a client-visible 400
                log.exception("annotation failed")
                self._error(400, f"annotation failed: {exc}")
                return
            self._reply(200, to_json(doc))

        def log_message(self, fmt, *args):
            log.debug("%s - %s", self.address_string(), fmt % args)

    return ThreadingHTTPServer((host, port), Handler)


def serve(bundle: PipelineBundle, port: int, host: str = "0.0.0.0",
          cors_origin: str = "*"):
    """Run the annotation service until interrupted."""
    server = make_server(bundle, port, host=host, cors_origin=cors_origin)
    log.info("serving on %s:%d", *server.server_address)
    try:
        server.serve_forever()
    finally:
        server.server_close()
