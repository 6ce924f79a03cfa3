# sample_messages.py
"""
Protocol Buffer messages exchanged between the experiment driver and its
sample workers.

The schema is declared here as a FileDescriptorProto and loaded with
AddSerializedFile, the same call protoc-generated *_pb2 modules make, so no
protoc step is needed:

    message SampleTask   { uint32 index = 1; }
    message SampleRecord { uint32 index = 1; repeated double d0 = 2;
                           repeated double d1 = 3; string fingerprint = 4;
                           string error_kind = 5; string error_message = 6; }

On the wire every message carries a one-byte type prefix: b"T" for tasks,
b"R" for records.
"""

from google.protobuf import descriptor_pb2, descriptor_pool, message_factory

TASK_PREFIX = b"T"
RECORD_PREFIX = b"R"

_FIELD = descriptor_pb2.FieldDescriptorProto


def _add_field(message, name, number, field_type, repeated=False):
    field = message.field.add()
    field.name = name
    field.number = number
    field.type = field_type
    field.label = _FIELD.LABEL_REPEATED if repeated else _FIELD.LABEL_OPTIONAL


def _file_descriptor():
    proto = descriptor_pb2.FileDescriptorProto()
    proto.name = "netdist/sample_messages.proto"
    proto.package = "netdist"
    proto.syntax = "proto3"

    task = proto.message_type.add()
    task.name = "SampleTask"
    _add_field(task, "index", 1, _FIELD.TYPE_UINT32)

    record = proto.message_type.add()
    record.name = "SampleRecord"
    _add_field(record, "index", 1, _FIELD.TYPE_UINT32)
    _add_field(record, "d0", 2, _FIELD.TYPE_DOUBLE, repeated=True)
    _add_field(record, "d1", 3, _FIELD.TYPE_DOUBLE, repeated=True)
    _add_field(record, "fingerprint", 4, _FIELD.TYPE_STRING)
    _add_field(record, "error_kind", 5, _FIELD.TYPE_STRING)
    _add_field(record, "error_message", 6, _FIELD.TYPE_STRING)
    return proto


_pool = descriptor_pool.DescriptorPool()
_pool.AddSerializedFile(_file_descriptor().SerializeToString())

SampleTask = message_factory.GetMessageClass(_pool.FindMessageTypeByName("netdist.SampleTask"))
SampleRecord = message_factory.GetMessageClass(_pool.FindMessageTypeByName("netdist.SampleRecord"))


def encode_task(index):
    return TASK_PREFIX + SampleTask(index=index).SerializeToString()


def encode_record(record):
    return RECORD_PREFIX + record.SerializeToString()


def decode_frame(raw):
    """Split a framed message into (prefix, parsed message)"""
    if len(raw) < 1:
        raise ValueError("empty message")
    prefix, payload = raw[:1], raw[1:]
    if prefix == TASK_PREFIX:
        message = SampleTask()
    elif prefix == RECORD_PREFIX:
        message = SampleRecord()
    else:
        raise ValueError(f"unknown message type {prefix!r}")
    message.ParseFromString(payload)
    return prefix, message
