# Generated by Django 5.1 on 2026-10-19 09:12

from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='Run',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('kind', models.CharField(choices=[('elect', 'Elect'), ('adversary', 'Adversary'), ('explore', 'Explore'), ('encode_check', 'Encode Check')], max_length=20)),
                ('dialect', models.CharField(max_length=10)),
                ('source', models.TextField()),
                ('verdict', models.JSONField(default=dict)),
                ('trace_path', models.CharField(blank=True, max_length=500)),
                ('created', models.DateTimeField(auto_now_add=True)),
            ],
            options={
                'ordering': ['-created', '-id'],
            },
        ),
    ]
