"""Peewee ORM models for the run history."""

from datetime import datetime

from peewee import (
    CharField,
    DateTimeField,
    FloatField,
    IntegerField,
    Model,
    SqliteDatabase,
    TextField,
)

# Database instance (will be initialized in database.py)
db = SqliteDatabase(None)


class BaseModel(Model):
    """Base model with database connection."""

    class Meta:
        database = db


class RunRecord(BaseModel):
    """
    One saved run.

    The summary columns are for listing and filtering; ``report`` holds the
    full report JSON, from which ``show`` re-renders it.
    """

    created_at = DateTimeField(default=datetime.now, index=True)
    instance_name = CharField(null=True, index=True)
    instance_path = CharField(null=True)
    mode = CharField()
    algorithm = CharField()
    guesses = CharField(null=True)
    epsilon = FloatField()
    n = IntegerField()
    status = CharField()
    cost = FloatField(null=True)  # None when unsolved or infinite
    ratio = FloatField(null=True)
    report = TextField()

    class Meta:
        table_name = "runs"
        indexes = ((("mode", "created_at"), False),)
